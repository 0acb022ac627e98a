"""Shortest internal paths between opposite sides of a marked quadrilateral.

The exact solver runs Dijkstra on a visibility graph whose nodes are the
polygon vertices that can carry a geodesic (reflex vertices and vertices on
the two target sides) plus the endpoints of the admissible side pieces.  The
first and last legs are completed analytically: a perpendicular foot on a
side edge, or a perpendicular segment between parallel side edges when the
geodesic is a single straight segment.

:func:`geodesic_oracle` is an independent 8-neighbour grid Dijkstra used to
cross-check the exact solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import GridTooCoarse, InvalidDelta
from .geom_core import (
    BoundaryLocation,
    MarkedQuadrilateral,
    SideId,
    arc_diameter,
    classify_points,
    crossing_parity,
    orient_many,
    pair_sides,
    points_to_polyline_distance,
    side_set_distance,
)

# 8-neighbour grid metric overshoots Euclidean length by at most sqrt(4 - 2*sqrt(2))
OCTILE_DISTORTION = math.sqrt(4.0 - 2.0 * math.sqrt(2.0))


@dataclass(frozen=True, eq=False)
class GeodesicResult:
    path: np.ndarray
    length: float
    endpoint_sides: tuple[SideId, SideId]
    endpoint_locations: tuple[BoundaryLocation, BoundaryLocation]

    def to_json(self) -> dict:
        return {"length": float(self.length), "path": [[float(x), float(y)] for x, y in self.path]}


@dataclass(frozen=True)
class ExclusionSpec:
    """Radius of the open disks around the four marks that endpoints must avoid."""

    delta: float


class _Seg(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    edge: int  # refined edge index
    u0: float  # fraction along the refined edge at ``a``
    u1: float


# ---------------------------------------------------------------------------
# visibility


def _visible(ring, P, Q, hosts_p, hosts_q, eta, chunk=1_500_000):
    """Whether each closed segment [P[k], Q[k]] lies in the closed polygon.

    ``hosts_*`` list polygon edges containing the endpoints (padded with -1);
    crossings against them are ignored since a computed foot point may sit a
    rounding error off its edge.
    """
    ring = np.asarray(ring, dtype=float)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    c = len(P)
    m = len(ring)
    out = np.zeros(c, dtype=bool)
    if c == 0:
        return out
    hosts = np.concatenate([np.atleast_2d(hosts_p), np.atleast_2d(hosts_q)], axis=1)
    ax, ay = ring[:, 0], ring[:, 1]
    nxt = np.roll(ring, -1, axis=0)
    bx, by = nxt[:, 0], nxt[:, 1]
    step = max(1, chunk // m)
    for s in range(0, c, step):
        p, q, hs = P[s : s + step], Q[s : s + step], hosts[s : s + step]
        k = len(p)
        px, py, qx, qy = p[:, 0:1], p[:, 1:2], q[:, 0:1], q[:, 1:2]
        # cheap reject: edges whose bounding box misses the segment's
        lox, hix = np.minimum(px, qx), np.maximum(px, qx)
        loy, hiy = np.minimum(py, qy), np.maximum(py, qy)
        ebox = (
            (np.minimum(ax, bx)[None] <= hix)
            & (np.maximum(ax, bx)[None] >= lox)
            & (np.minimum(ay, by)[None] <= hiy)
            & (np.maximum(ay, by)[None] >= loy)
        )
        rows, cols = np.nonzero(ebox)
        o_a = np.ones((k, m), dtype=np.int8)
        if len(rows):
            o_a_part = orient_many(px[rows, 0], py[rows, 0], qx[rows, 0], qy[rows, 0], ax[cols], ay[cols])
            # vertex a_e is also the end of edge e-1; need its sign wherever either edge is near
            o_a[rows, cols] = o_a_part
            prev_cols = (cols + 1) % m
            need = ~ebox[rows, prev_cols]
            if need.any():
                r2, c2 = rows[need], prev_cols[need]
                o_a[r2, c2] = orient_many(px[r2, 0], py[r2, 0], qx[r2, 0], qy[r2, 0], ax[c2], ay[c2])
            o_b = o_a[rows, (cols + 1) % m]
            straddle = o_a_part.astype(np.int16) * o_b < 0
            r3, c3 = rows[straddle], cols[straddle]
            o_p = orient_many(ax[c3], ay[c3], bx[c3], by[c3], px[r3, 0], py[r3, 0])
            o_q = orient_many(ax[c3], ay[c3], bx[c3], by[c3], qx[r3, 0], qy[r3, 0])
            proper = o_p.astype(np.int16) * o_q < 0
            skip = np.zeros(len(r3), dtype=bool)
            for col in range(hs.shape[1]):
                skip |= hs[r3, col] == c3
            proper &= ~skip
            blocked = np.zeros(k, dtype=bool)
            blocked[r3[proper]] = True
            # collinear polygon vertices strictly inside the segment
            zero = o_a_part == 0
            rz, cz = rows[zero], cols[zero]
        else:
            blocked = np.zeros(k, dtype=bool)
            rz = cz = np.zeros(0, dtype=int)
        dx, dy = (qx - px)[:, 0], (qy - py)[:, 0]
        ll = dx * dx + dy * dy
        with np.errstate(invalid="ignore", divide="ignore"):
            tz = ((ax[cz] - px[rz, 0]) * dx[rz] + (ay[cz] - py[rz, 0]) * dy[rz]) / ll[rz]
        inner = (tz > 0) & (tz < 1)
        rz, tz = rz[inner], tz[inner]
        contacts: dict[int, list[float]] = {}
        for r, t in zip(rz.tolist(), tz.tolist()):
            contacts.setdefault(r, []).append(t)
        cand = np.nonzero(~blocked)[0]
        simple = [r for r in cand if r not in contacts]
        mids, owner = [], []
        if simple:
            simple = np.array(simple)
            mids.append(0.5 * (p[simple] + q[simple]))
            owner.append(simple)
        for r in cand:
            if r in contacts:
                ts = np.unique(np.concatenate([[0.0, 1.0], contacts[r]]))
                tm = 0.5 * (ts[1:] + ts[:-1])
                mids.append(p[r] + tm[:, None] * (q[r] - p[r]))
                owner.append(np.full(len(tm), r))
        res = np.zeros(k, dtype=bool)
        if mids:
            mids = np.concatenate(mids)
            owner = np.concatenate(owner)
            ok = crossing_parity(ring, mids)
            if not ok.all():
                # midpoints on a wall can round to the outside
                out_idx = np.nonzero(~ok)[0]
                ok[out_idx] = classify_points(ring, mids[out_idx], eta) >= 0
            good = np.ones(k, dtype=bool)
            np.logical_and.at(good, owner, ok)
            res[cand] = good[cand]
        out[s : s + step] = res
    return out


def segment_in_polygon(ring, p, q, eta) -> bool:
    """Closed segment [p, q] lies in the closed polygon ``ring`` (no host edges)."""
    pad = np.full((1, 2), -1)
    return bool(_visible(ring, [p], [q], pad, pad, eta)[0])


# ---------------------------------------------------------------------------
# core solver


def _clip_outside_disks(a, b, centers, delta):
    """Sub-intervals [u0, u1] of segment [a, b] at distance >= delta from every centre."""
    d = b - a
    aa = float(d @ d)
    removed = []
    for c in centers:
        f = a - c
        bb = 2.0 * float(f @ d)
        cc = float(f @ f) - delta * delta
        disc = bb * bb - 4 * aa * cc
        if disc <= 0:
            continue
        sq = math.sqrt(disc)
        t1, t2 = (-bb - sq) / (2 * aa), (-bb + sq) / (2 * aa)
        if t2 <= 0 or t1 >= 1:
            continue
        removed.append((max(t1, 0.0), min(t2, 1.0)))
    removed.sort()
    keep, cur = [], 0.0
    for lo, hi in removed:
        if lo > cur:
            keep.append((cur, lo))
        cur = max(cur, hi)
    if cur < 1.0:
        keep.append((cur, 1.0))
    return [(u0, u1) for u0, u1 in keep if u1 > u0]


def _side_segments(Q: MarkedQuadrilateral, side: SideId, delta: float | None):
    rb = Q.refined
    xy = rb.xy
    segs = []
    j = side.value
    centers = [Q.mark_points[j], Q.mark_points[(j + 1) % 4]]
    for e in rb.side_edges(side):
        a, b = xy[e], xy[(e + 1) % rb.n]
        if delta is None:
            segs.append(_Seg(a, b, e, 0.0, 1.0))
            continue
        for u0, u1 in _clip_outside_disks(a, b, centers, delta):
            pa = a if u0 == 0.0 else a + u0 * (b - a)
            pb = b if u1 == 1.0 else a + u1 * (b - a)
            segs.append(_Seg(pa, pb, e, u0, u1))
    return segs


def _pad_hosts(hosts_list, width=2):
    out = np.full((len(hosts_list), width), -1, dtype=np.int64)
    for i, h in enumerate(hosts_list):
        out[i, : len(h)] = h
    return out


def _foot(p, seg: _Seg):
    d = seg.b - seg.a
    ll = float(d @ d)
    if ll == 0:
        return None
    tau = float((p - seg.a) @ d) / ll
    if not 0.0 < tau < 1.0:
        return None
    return tau, seg.a + tau * d


def _euclid(v):
    return np.hypot(v[..., 0], v[..., 1])


def _octile(v):
    a = np.abs(v)
    return a.max(axis=-1) + (math.sqrt(2.0) - 1.0) * a.min(axis=-1)


def _solve(Q: MarkedQuadrilateral, src: list[_Seg], tgt: list[_Seg], norm=_euclid):
    rb = Q.refined
    ring = rb.xy
    n = rb.n
    eta = Q.eta
    reflex = _reflex(ring)

    # --- nodes
    node_xy, node_hosts, node_loc = [], [], []
    key_index: dict[tuple, int] = {}

    def add_node(xy, hosts, loc):
        key = (float(xy[0]), float(xy[1]))
        if key in key_index:
            return key_index[key]
        key_index[key] = len(node_xy)
        node_xy.append(np.asarray(xy, dtype=float))
        node_hosts.append(hosts)
        node_loc.append(loc)
        return key_index[key]

    def seg_endpoint_node(seg: _Seg, end: int):
        u = seg.u0 if end == 0 else seg.u1
        pt = seg.a if end == 0 else seg.b
        if u == 0.0:
            k = seg.edge
            return add_node(ring[k], ((k - 1) % n, k), (k, 0.0))
        if u == 1.0:
            k = (seg.edge + 1) % n
            return add_node(ring[k], ((k - 1) % n, k), (k, 0.0))
        return add_node(pt, (seg.edge,), (seg.edge, u))

    src_nodes = {seg_endpoint_node(s, e) for s in src for e in (0, 1)}
    tgt_nodes = {seg_endpoint_node(s, e) for s in tgt for e in (0, 1)}
    for k in np.nonzero(reflex)[0]:
        add_node(ring[k], ((k - 1) % n, k), (int(k), 0.0))
    N = len(node_xy)
    X = np.array(node_xy)
    H = _pad_hosts(node_hosts)

    # --- node-node visibility
    W = np.full((N, N), np.inf)
    iu, ju = np.triu_indices(N, k=1)
    vis = _visible(ring, X[iu], X[ju], H[iu], H[ju], eta)
    d = norm(X[iu] - X[ju])
    W[iu[vis], ju[vis]] = d[vis]
    W[ju[vis], iu[vis]] = d[vis]

    # --- analytic first / last legs
    def leg_costs(segs, flagged):
        cost = np.full(N, np.inf)
        via = [None] * N
        for u in flagged:
            cost[u] = 0.0
        cand_u, cand_pt, cand_host, cand_info = [], [], [], []
        for u in range(N):
            if u in flagged:
                continue
            for seg in segs:
                f = _foot(X[u], seg)
                if f is None:
                    continue
                tau, pt = f
                cand_u.append(u)
                cand_pt.append(pt)
                cand_host.append((seg.edge,))
                cand_info.append((seg.edge, seg.u0 + tau * (seg.u1 - seg.u0)))
        if cand_u:
            cu = np.array(cand_u)
            cp = np.array(cand_pt)
            ok = _visible(ring, X[cu], cp, H[cu], _pad_hosts(cand_host), eta)
            dist = norm(X[cu] - cp)
            for i in np.nonzero(ok)[0]:
                u = cu[i]
                if dist[i] < cost[u]:
                    cost[u] = dist[i]
                    via[u] = (cp[i], cand_info[i])
        return cost, via

    s_cost, s_via = leg_costs(src, src_nodes)
    t_cost, t_via = leg_costs(tgt, tgt_nodes)

    # --- Dijkstra over the dense graph
    dist = s_cost.copy()
    pred = np.full(N, -1)
    done = np.zeros(N, dtype=bool)
    for _ in range(N):
        masked = np.where(done, np.inf, dist)
        u = int(np.argmin(masked))
        if not np.isfinite(masked[u]):
            break
        done[u] = True
        nd = dist[u] + W[u]
        better = (nd < dist) & ~done
        dist[better] = nd[better]
        pred[better] = u
    total = dist + t_cost

    candidates = []
    if np.isfinite(total).any():
        best = float(total.min())
        for end in np.nonzero(total <= best * (1 + 1e-12) + 1e-300)[0]:
            chain = [int(end)]
            while pred[chain[-1]] >= 0:
                chain.append(int(pred[chain[-1]]))
            chain.reverse()
            start = chain[0]
            pts = [X[i] for i in chain]
            if s_via[start] is not None:
                sp, sloc = s_via[start]
                pts.insert(0, sp)
            else:
                sloc = node_loc[start]
            if t_via[end] is not None:
                tp, tloc = t_via[end]
                pts.append(tp)
            else:
                tloc = node_loc[chain[-1]]
            candidates.append((float(total[end]), 1, sloc, tloc, np.array(pts)))

    bound = min((c[0] for c in candidates), default=np.inf)
    candidates.extend(_direct_candidates(ring, eta, src, tgt, bound, norm))
    if not candidates:
        raise RuntimeError("no path between sides; polygon is not connected?")
    best_len = min(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] <= best_len * (1 + 1e-12) + 1e-300]
    # ties: a centred straight segment first, then the smallest endpoint locations
    length, _, sloc, tloc, path = min(tied, key=lambda c: (c[1], c[2], c[3]))
    # drop zero-length legs
    keep = [0] + [i for i in range(1, len(path)) if np.any(path[i] != path[i - 1])]
    path = path[keep]
    return path, (rb.location(*_norm_loc(sloc, n)), rb.location(*_norm_loc(tloc, n)))


def _norm_loc(loc, n):
    k, u = loc
    if u >= 1.0:
        return (k + 1) % n, 0.0
    return int(k), float(u)


def _reflex(ring):
    prev = np.roll(ring, 1, axis=0)
    nxt = np.roll(ring, -1, axis=0)
    return orient_many(prev[:, 0], prev[:, 1], ring[:, 0], ring[:, 1], nxt[:, 0], nxt[:, 1]) < 0


def _direct_candidates(ring, eta, src, tgt, bound=np.inf, norm=_euclid):
    """Single-segment geodesics perpendicular to a pair of parallel side pieces.

    Pairs farther apart than ``bound`` cannot win and are skipped.
    """
    out = []
    for s in src:
        ds = s.b - s.a
        ls = float(np.hypot(*ds))
        if ls == 0:
            continue
        dir_ = ds / ls
        normal = np.array([-dir_[1], dir_[0]])
        for t in tgt:
            dt = t.b - t.a
            if abs(float(ds[0] * dt[1] - ds[1] * dt[0])) > 1e-12 * ls * float(np.hypot(*dt)):
                continue
            sep = float((t.a - s.a) @ normal)
            if sep == 0 or abs(sep) > bound * (1 + 1e-12):
                continue
            # overlap of the projections on the common direction
            ta, tb = float((t.a - s.a) @ dir_), float((t.b - s.a) @ dir_)
            lo, hi = max(0.0, min(ta, tb)), min(ls, max(ta, tb))
            if hi <= lo:
                continue
            proj = (ring - s.a) @ dir_
            brk = np.unique(np.concatenate([[lo, hi], proj[(proj > lo) & (proj < hi)]]))
            mids = 0.5 * (brk[1:] + brk[:-1])
            P = s.a + mids[:, None] * dir_
            Qp = P + sep * normal
            hosts_p = np.full((len(P), 1), s.edge)
            hosts_q = np.full((len(P), 1), t.edge)
            ok = _visible(ring, P, Qp, hosts_p, hosts_q, eta)
            if not ok.any():
                continue
            # longest run of visible pieces; report its midpoint
            best, run_start = None, None
            for i in range(len(ok) + 1):
                if i < len(ok) and ok[i]:
                    if run_start is None:
                        run_start = i
                elif run_start is not None:
                    a_, b_ = brk[run_start], brk[i]
                    if best is None or b_ - a_ > best[1] - best[0]:
                        best = (a_, b_)
                    run_start = None
            lam = 0.5 * (best[0] + best[1])
            p0 = s.a + lam * dir_
            p1 = p0 + sep * normal
            su = s.u0 + (lam / ls) * (s.u1 - s.u0)
            lt = float(np.hypot(*dt))
            tau_t = float((p1 - t.a) @ dt) / (lt * lt)
            tu = t.u0 + tau_t * (t.u1 - t.u0)
            out.append((float(norm(p1 - p0)), 0, (s.edge, su), (t.edge, tu), np.array([p0, p1])))
    return out


# ---------------------------------------------------------------------------
# public API


def _result(Q, pair, path, locs):
    sides = pair_sides(pair)
    length = float(np.hypot(*np.diff(path, axis=0).T).sum()) if len(path) > 1 else 0.0
    return GeodesicResult(path, length, sides, locs)


def geodesic_between_sides(Q: MarkedQuadrilateral, pair: str) -> GeodesicResult:
    """Globally shortest path in the closed polygon joining the two sides of ``pair``."""
    s1, s2 = pair_sides(pair)
    path, locs = _solve(Q, _side_segments(Q, s1, None), _side_segments(Q, s2, None))
    return _result(Q, pair, path, locs)


def octile_side_distance(Q: MarkedQuadrilateral, pair: str) -> float:
    """Side-to-side distance in the 8-neighbour grid norm, on the same visibility graph.

    This is the quantity :func:`geodesic_oracle` converges to, so the two can be
    compared without the anisotropy of the grid metric.  Exact for rectilinear
    input, where every side leg is axis-parallel.
    """
    s1, s2 = pair_sides(pair)
    path, _ = _solve(Q, _side_segments(Q, s1, None), _side_segments(Q, s2, None), norm=_octile)
    return float(_octile(np.diff(path, axis=0)).sum()) if len(path) > 1 else 0.0


def side_distances(Q: MarkedQuadrilateral) -> tuple[float, float]:
    """(s_a, s_b)."""
    return geodesic_between_sides(Q, "A").length, geodesic_between_sides(Q, "B").length


def exclusion_bounds(Q: MarkedQuadrilateral) -> dict:
    sides = {s.name: Q.side_arc(s) for s in SideId}
    diam = {k: arc_diameter(v) for k, v in sides.items()}
    dist = {
        "A": side_set_distance(sides["A1"], sides["A2"]),
        "B": side_set_distance(sides["B1"], sides["B2"]),
    }
    return {"diam": diam, "dist": dist}


def max_valid_delta(Q: MarkedQuadrilateral) -> float:
    """Supremum of admissible exclusion radii (the bounds are strict)."""
    b = exclusion_bounds(Q)
    return min(min(b["diam"].values()), min(b["dist"].values())) / 10.0


def validate_exclusion_delta(Q: MarkedQuadrilateral, delta: float) -> tuple[bool, list[str]]:
    """Check 10*delta against every side diameter and both opposite-side distances."""
    b = exclusion_bounds(Q)
    problems = []
    if not delta > 0:
        problems.append(f"delta must be positive, got {delta}")
    for name, v in b["diam"].items():
        if not 10 * delta < v:
            problems.append(f"10*delta={10 * delta:g} >= diam({name})={v:g}")
    for name, v in b["dist"].items():
        if not 10 * delta < v:
            problems.append(f"10*delta={10 * delta:g} >= dist({name}1,{name}2)={v:g}")
    return not problems, problems


def truncated_internal_distance(Q: MarkedQuadrilateral, pair: str, spec: ExclusionSpec) -> GeodesicResult:
    """Shortest path whose endpoints stay out of the open disks of radius delta
    around the marks bounding each side; the path itself is unconstrained."""
    ok, why = validate_exclusion_delta(Q, spec.delta)
    if not ok:
        raise InvalidDelta("; ".join(why))
    s1, s2 = pair_sides(pair)
    src = _side_segments(Q, s1, spec.delta)
    tgt = _side_segments(Q, s2, spec.delta)
    path, locs = _solve(Q, src, tgt)
    return _result(Q, pair, path, locs)


def path_inside(Q: MarkedQuadrilateral, path, step: float | None = None) -> bool:
    """Dense sampling check that a polyline stays in the closed polygon."""
    path = np.asarray(path, dtype=float)
    if len(path) < 2:
        pts = path
    else:
        seglen = np.hypot(*np.diff(path, axis=0).T)
        total = float(seglen.sum())
        if step is None:
            step = max(Q.eta, total / 4000.0)
        pts = [path[:1]]
        for a, b, l in zip(path[:-1], path[1:], seglen):
            k = max(1, int(math.ceil(l / step)))
            t = np.linspace(0, 1, k + 1)[1:]
            pts.append(a + t[:, None] * (b - a))
        pts = np.concatenate(pts)
    return bool(np.all(classify_points(Q.polygon.xy, pts, 4 * Q.eta) >= 0))


# ---------------------------------------------------------------------------
# oracle


def _grid_graph(ring, h, eta, x0, y0, nx, ny):
    xs = x0 + h * np.arange(nx)
    ys = y0 + h * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    valid = classify_points(ring, pts, eta) >= 0
    idx = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, wts = [], [], []
    for di, dj, w in ((1, 0, h), (0, 1, h), (1, 1, h * math.sqrt(2)), (1, -1, h * math.sqrt(2))):
        i0, i1 = (0, nx - di) if di >= 0 else (-di, nx)
        j0, j1 = (0, ny - dj) if dj >= 0 else (-dj, ny)
        a = idx[i0:i1, j0:j1].ravel()
        b = idx[i0 + di : i1 + di, j0 + dj : j1 + dj].ravel()
        both = valid[a] & valid[b]
        a, b = a[both], b[both]
        mids = 0.5 * (pts[a] + pts[b])
        ok = classify_points(ring, mids, eta) >= 0
        a, b = a[ok], b[ok]
        rows += [a, b]
        cols += [b, a]
        wts += [np.full(len(a), w)] * 2
    return pts, valid, np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)


def geodesic_oracle(Q: MarkedQuadrilateral, pair: str, h: float) -> float:
    """Brute-force geodesic length: 8-neighbour Dijkstra on a grid of step ``h``.

    Start nodes are grid nodes within ``h`` of the first side, seeded with
    their Euclidean distance to it; the distance to the second side is added
    at the end.
    """
    if not h > 0:
        raise ValueError("grid step must be positive")
    s1, s2 = pair_sides(pair)
    ring = Q.polygon.xy
    eta = Q.eta
    x0, y0, x1, y1 = Q.polygon.bbox
    nx = int(math.floor((x1 - x0) / h + 1e-9)) + 1
    ny = int(math.floor((y1 - y0) / h + 1e-9)) + 1
    pts, valid, r, c, w = _grid_graph(ring, h, eta, x0, y0, nx, ny)
    vidx = np.nonzero(valid)[0]
    d1 = np.full(len(pts), np.inf)
    d2 = np.full(len(pts), np.inf)
    d1[vidx] = points_to_polyline_distance(pts[vidx], Q.side_arc(s1))
    d2[vidx] = points_to_polyline_distance(pts[vidx], Q.side_arc(s2))
    srcs = np.nonzero(d1 <= h + eta)[0]
    tgts = np.nonzero(d2 <= h + eta)[0]
    if len(srcs) == 0 or len(tgts) == 0:
        raise GridTooCoarse(f"no grid nodes within h={h} of a side")
    n = len(pts)
    offset = 1.0
    r = np.concatenate([r, np.full(len(srcs), n)])
    c = np.concatenate([c, srcs])
    w = np.concatenate([w, d1[srcs] + offset])
    g = coo_matrix((w, (r, c)), shape=(n + 1, n + 1)).tocsr()
    dist = dijkstra(g, directed=True, indices=n)
    total = dist[tgts] - offset + d2[tgts]
    return float(total.min())
