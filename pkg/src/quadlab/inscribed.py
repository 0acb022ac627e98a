"""Largest inscribed disk (pole of inaccessibility) of a simple polygon.

Three stages: a coarse grid seed, a coordinate-descent polish of the exact
distance function, then exact enumeration of the medial-axis junction
candidates (points equidistant from three features among the edges and
reflex vertices near the polished point).
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .geom_core import crossing_parity, orient_many, point_segment_distance, points_to_polyline_distance


def _dist(ring, pts):
    return points_to_polyline_distance(np.atleast_2d(pts), ring, closed=True)


def _inside(ring, pts):
    return crossing_parity(ring, np.atleast_2d(pts))


def _polish(ring, p, r, step, floor):
    """Greedy 4-direction coordinate descent on the (concave-ish) distance field."""
    dirs = np.array([(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)], float)
    while step > floor:
        cand = p + step * dirs
        d = _dist(ring, cand)
        d[~_inside(ring, cand)] = -np.inf
        k = int(np.argmax(d))
        if d[k] > r:
            p, r = cand[k], float(d[k])
        else:
            step *= 0.5
    return p, r


def _candidates(lines, points):
    """Centres equidistant (radius r) from three features.

    ``lines`` are (a, n) with unit inward normal n (signed distance n.(c-a));
    ``points`` are reflex vertices.
    """
    out = []
    feats = [("L", f) for f in lines] + [("P", f) for f in points]
    for trio in itertools.combinations(feats, 3):
        ls = [f for k, f in trio if k == "L"]
        ps = [f for k, f in trio if k == "P"]
        try:
            out.extend(_solve_trio(ls, ps))
        except (np.linalg.LinAlgError, ZeroDivisionError, ValueError):
            continue
    return out


def _quad_roots(a, b, c):
    if abs(a) < 1e-300:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        if disc > -1e-12 * b * b:
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    return [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]


def _solve_trio(ls, ps):
    res = []
    if len(ls) == 3:
        A = np.array([[n[0], n[1], -1.0] for _, n in ls])
        b = np.array([n @ a for a, n in ls])
        if abs(np.linalg.det(A)) < 1e-14:
            return []
        x = np.linalg.solve(A, b)
        res.append(x[:2])
    elif len(ls) == 2:
        (a1, n1), (a2, n2), P = ls[0], ls[1], ps[0]
        N = np.array([n1, n2])
        if abs(np.linalg.det(N)) > 1e-14:
            # c = c0 + r * c1
            c0 = np.linalg.solve(N, [n1 @ a1, n2 @ a2])
            c1 = np.linalg.solve(N, [1.0, 1.0])
            f = c0 - P
            for r in _quad_roots(c1 @ c1 - 1.0, 2 * (f @ c1), f @ f):
                if r > 0:
                    res.append(c0 + r * c1)
        else:
            # parallel: r is half the gap, centre on the mid-line
            gap = n1 @ (a2 - a1)
            if abs(gap) < 1e-300:
                return []
            r = abs(gap) / 2
            m = a1 + n1 * r
            d = np.array([-n1[1], n1[0]])
            f = m - P
            for s in _quad_roots(1.0, 2 * (f @ d), f @ f - r * r):
                res.append(m + s * d)
    elif len(ls) == 1:
        (a, n), P1, P2 = ls[0], ps[0], ps[1]
        mid = 0.5 * (P1 + P2)
        e = P2 - P1
        d = np.array([-e[1], e[0]])
        d /= np.hypot(*d)
        # r(s) = n.(mid + s d - a) = r0 + s k
        r0, k = n @ (mid - a), n @ d
        f = mid - P1
        # |f + s d|^2 = (r0 + s k)^2
        for s in _quad_roots(1.0 - k * k, 2 * (f @ d) - 2 * r0 * k, f @ f - r0 * r0):
            res.append(mid + s * d)
    else:
        P1, P2, P3 = ps
        A = 2 * np.array([P2 - P1, P3 - P1])
        b = np.array([P2 @ P2 - P1 @ P1, P3 @ P3 - P1 @ P1])
        if abs(np.linalg.det(A)) < 1e-14 * max(1.0, float(np.abs(A).max())) ** 2:
            return []
        res.append(np.linalg.solve(A, b))
    return res


def largest_inscribed_disk_ring(ring, seeds: int = 4, grid: int = 256) -> tuple[np.ndarray, float]:
    """(centre, radius) maximising the distance to the boundary over the polygon."""
    ring = np.asarray(ring, dtype=float)
    x0, y0 = ring.min(axis=0)
    x1, y1 = ring.max(axis=0)
    span = max(x1 - x0, y1 - y0)
    diag = math.hypot(x1 - x0, y1 - y0)
    step = span / grid
    xs = np.arange(x0 + step / 2, x1, step)
    ys = np.arange(y0 + step / 2, y1, step)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    pts = pts[_inside(ring, pts)]
    if len(pts) == 0:
        # extremely thin polygon: fall back to edge midpoints nudged inward
        pts = 0.5 * (ring + np.roll(ring, -1, axis=0))
    d = _dist(ring, pts)
    order = np.argsort(-d, kind="stable")
    best_p, best_r = None, -1.0
    picked = []
    for k in order:
        if len(picked) >= seeds:
            break
        if any(np.hypot(*(pts[k] - q)) < 4 * step for q in picked):
            continue
        picked.append(pts[k])
        p, r = _polish(ring, pts[k], float(d[k]), step, 1e-12 * diag)
        if r > best_r:
            best_p, best_r = p, r

    # exact enumeration around the polished optimum
    n = len(ring)
    a = ring
    b = np.roll(ring, -1, axis=0)
    prev = np.roll(ring, 1, axis=0)
    reflex = orient_many(prev[:, 0], prev[:, 1], a[:, 0], a[:, 1], b[:, 0], b[:, 1]) < 0
    per_edge = point_segment_distance(best_p[0], best_p[1], a[:, 0], a[:, 1], b[:, 0], b[:, 1])
    near = np.argsort(per_edge, kind="stable")[: min(n, 10)]
    near = [int(e) for e in near if per_edge[e] <= best_r * 1.05 + 2 * step]
    lines = []
    for e in near:
        t = b[e] - a[e]
        ln = math.hypot(*t)
        if ln == 0:
            continue
        lines.append((a[e], np.array([-t[1], t[0]]) / ln))  # CCW ring: interior on the left
    vd = np.hypot(*(a - best_p).T)
    pts_near = [a[k] for k in np.argsort(vd, kind="stable")[:8] if reflex[k] and vd[k] <= best_r * 1.05 + 2 * step]
    cands = _candidates(lines, pts_near)
    if cands:
        C = np.array(cands)
        C = C[np.all(np.isfinite(C), axis=1)]
        if len(C):
            ok = _inside(ring, C)
            C = C[ok]
            if len(C):
                dc = _dist(ring, C)
                k = int(np.argmax(dc))
                if dc[k] >= best_r:
                    best_p, best_r = C[k], float(dc[k])
    return np.asarray(best_p, dtype=float), float(best_r)


def inscribed_radius_oracle(ring, n: int = 1024) -> float:
    """Brute force: max distance to the boundary over an n x n grid of inside points."""
    ring = np.asarray(ring, dtype=float)
    x0, y0 = ring.min(axis=0)
    x1, y1 = ring.max(axis=0)
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    best = 0.0
    for x in xs:
        col = np.column_stack([np.full(n, x), ys])
        col = col[_inside(ring, col)]
        if len(col):
            best = max(best, float(_dist(ring, col).max()))
    return best
