"""Inscribed disks and the constructive disk-of-radius-r pipeline.

For a quadrilateral with internal-distance ratio at most ``L`` the pipeline
finds a disk of radius ``r = s_a / (1000 L)`` inside the domain:

1. take the pair-A geodesic ``C`` (nudged off the marks if it ends on one);
2. centre a disk of radius ``R = 10 r`` at the arclength midpoint ``w0``;
3. split that disk along ``C`` and find a component whose boundary points
   are confined near the two circle crossings;
4. place a radius-``r`` disk either tangent to the 3-epsilon neighbourhood of
   a straight half-chord, or internally tangent to the good circle arc at one
   of seven equally spaced points.

Every returned disk is checked directly against the polygon; if the
construction misbehaves numerically the global optimum is returned instead
and the trace says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationFailure, DegenerateSplit, ModulusOutOfRange, RatioBoundViolated
from .geom_core import (
    MarkedQuadrilateral,
    Point,
    contains_point,
    crossing_parity,
    distance_to_boundary,
    points_to_polyline_distance,
)
from .inscribed import inscribed_radius_oracle, largest_inscribed_disk_ring
from .internal_distance import (
    ExclusionSpec,
    geodesic_between_sides,
    max_valid_delta,
    side_distances,
    truncated_internal_distance,
)
from .modulus import conjugate, modulus_extrapolated, ratio_bound_from_K, rengel_bounds

TANGENT, SEVEN_ARC, GLOBAL = "tangent_construction", "seven_arc", "global_search"
DISK_SEGMENTS = 1024


@dataclass(frozen=True)
class DiskCandidate:
    center: Point
    radius: float
    provenance: str

    def to_json(self) -> dict:
        return {"center": [self.center.x, self.center.y], "radius": self.radius, "provenance": self.provenance}


def disk_fits(Q, center, radius) -> bool:
    """Centre strictly inside and boundary at distance >= radius."""
    if contains_point(Q, center) != "inside":
        return False
    return distance_to_boundary(Q, center) >= radius


def largest_inscribed_disk(Q) -> DiskCandidate:
    poly = getattr(Q, "polygon", Q)
    c, r = largest_inscribed_disk_ring(poly.xy)
    return DiskCandidate(Point(float(c[0]), float(c[1])), r, GLOBAL)


def inscribed_oracle(Q, n: int = 1024) -> float:
    return inscribed_radius_oracle(getattr(Q, "polygon", Q).xy, n)


# ---------------------------------------------------------------------------
# arc frame


def _cum(path):
    return np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(path, axis=0).T))])


@dataclass(frozen=True, eq=False)
class ArcFrame:
    C: np.ndarray
    cum: np.ndarray
    epsilon: float
    r: float
    R: float
    L: float
    s_a: float
    s_b: float
    F: tuple[float, float]
    Fp: tuple[float, float]
    nudged: bool = False
    nudge_delta: float = 0.0
    trace: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return float(self.cum[-1])

    def point_at(self, s: float) -> np.ndarray:
        s = min(max(s, 0.0), self.length)
        k = int(np.searchsorted(self.cum, s, side="right")) - 1
        k = min(max(k, 0), len(self.C) - 2)
        seg = self.cum[k + 1] - self.cum[k]
        u = 0.0 if seg == 0 else (s - self.cum[k]) / seg
        return self.C[k] + u * (self.C[k + 1] - self.C[k])

    def subarc(self, s0: float, s1: float) -> np.ndarray:
        s0, s1 = max(s0, 0.0), min(s1, self.length)
        inner = [self.C[k] for k in range(len(self.C)) if s0 < self.cum[k] < s1]
        return np.array([self.point_at(s0)] + inner + [self.point_at(s1)])

    def samples(self, window: str = "Fp", k: int = 10) -> np.ndarray:
        lo, hi = self.Fp if window == "Fp" else self.F
        if k == 1:
            return np.array([(lo + hi) / 2])
        return np.linspace(lo, hi, k)

    def to_json(self) -> dict:
        return {
            "C": self.C.tolist(),
            "length": self.length,
            "epsilon": self.epsilon,
            "r": self.r,
            "R": self.R,
            "L": self.L,
            "F": list(self.F),
            "Fp": list(self.Fp),
            "nudged": self.nudged,
        }


def build_arc_frame(Q: MarkedQuadrilateral, L: float, distances=None) -> ArcFrame:
    sa, sb = distances if distances is not None else side_distances(Q)
    ratio = max(sa / sb, sb / sa)
    if L < ratio * (1 - 1e-12):
        raise RatioBoundViolated(f"L={L} is below the actual ratio {ratio}")
    eta = Q.eta
    g = geodesic_between_sides(Q, "A")
    trace = {"s_a": sa, "s_b": sb, "ratio": ratio}
    path = g.path
    nudged, dn = False, 0.0
    V = Q.mark_points
    if np.min(np.hypot(*(V[:, None, :] - path[[0, -1]][None]).transpose(2, 0, 1))) <= eta:
        dn = max_valid_delta(Q) / 100
        gt = truncated_internal_distance(Q, "A", ExclusionSpec(dn))
        path, nudged = gt.path, True
        trace["nudge"] = {"delta": dn, "length": gt.length, "bound": sa + 4 * math.pi * dn}
    cum = _cum(path)
    ell = float(cum[-1])
    eps = eta + max(ell - sa, 0.0)
    r = sa / (1000 * L)
    R = 10 * r
    F = (15 * R, ell - 15 * R)
    Fp = (16 * R + 2 * eps, ell - 16 * R - 2 * eps)
    trace["assumption"] = "C meets no segment with both endpoints on one b-side (not checked)"
    return ArcFrame(path, cum, eps, r, R, L, sa, sb, F, Fp, nudged, dn, trace)


def check_exits(frame: ArcFrame, w0_s: float) -> tuple[bool, dict]:
    """Both sub-arcs of length 15R around ``w0`` leave the closed disk of radius R."""
    w0 = frame.point_at(w0_s)
    out = {}
    for name, (a, b) in (("back", (w0_s - 15 * frame.R, w0_s)), ("fwd", (w0_s, w0_s + 15 * frame.R))):
        arc = frame.subarc(a, b)
        # distance to w0 is convex along each segment, so vertices suffice
        out[name] = float(np.hypot(*(arc - w0).T).max())
    ok = out["back"] > frame.R and out["fwd"] > frame.R
    return ok, out


# ---------------------------------------------------------------------------
# split disk


@dataclass(frozen=True, eq=False)
class SplitDisk:
    w0: np.ndarray
    w0_s: float
    R: float
    w01: np.ndarray
    w02: np.ndarray
    s01: float
    s02: float
    arc: np.ndarray  # C(w01, w02)
    Dplus: np.ndarray  # left of C
    Dminus: np.ndarray
    theta: dict
    classification: dict
    n_components: int = 2
    N3eps: dict = field(default_factory=dict)

    def good(self) -> list[str]:
        return [k for k in ("plus", "minus") if self.classification[k]["confined"]]


def _first_crossing(frame: ArcFrame, w0_s: float, direction: int):
    """Arclength of the first point of C at distance R from w0, walking in ``direction``."""
    w0 = frame.point_at(w0_s)
    R = frame.R
    C, cum = frame.C, frame.cum
    if direction > 0:
        k = int(np.searchsorted(cum, w0_s, side="right")) - 1
        order = range(max(k, 0), len(C) - 1)
    else:
        k = int(np.searchsorted(cum, w0_s, side="left"))
        order = range(min(k, len(C) - 1), 0, -1)
    for i in order:
        if direction > 0:
            a, b, sa_ = C[i], C[i + 1], cum[i]
            seg = cum[i + 1] - cum[i]
            start = max(0.0, (w0_s - sa_) / seg) if seg > 0 else 0.0
        else:
            a, b, sa_ = C[i], C[i - 1], cum[i]
            seg = cum[i] - cum[i - 1]
            start = max(0.0, (sa_ - w0_s) / seg) if seg > 0 else 0.0
        if seg == 0:
            continue
        d = b - a
        f = a - w0
        A, B, Cc = d @ d, 2 * f @ d, f @ f - R * R
        disc = B * B - 4 * A * Cc
        if disc < 0:
            continue
        t = (-B + math.sqrt(disc)) / (2 * A)  # exit root
        if start <= t <= 1:
            s = sa_ + direction * t * seg
            return s, a + t * d
    raise DegenerateSplit("geodesic does not leave the disk")


def _circle_arc(c, R, a0, sweep, n_full=DISK_SEGMENTS):
    """Interior vertices of the circumscribed polygon along a CCW arc (endpoints excluded)."""
    k = max(1, int(math.ceil(abs(sweep) / (2 * math.pi) * n_full)))
    ang = a0 + sweep * np.arange(1, k) / k
    rr = R / math.cos(math.pi / n_full)
    return c + rr * np.column_stack([np.cos(ang), np.sin(ang)])


def _boundary_samples(Q, w0, R, step):
    """Points of the polygon boundary inside the closed disk, with outward directions."""
    xy = Q.polygon.xy
    n = len(xy)
    pts, dirs = [], []
    for e in range(n):
        a, b = xy[e], xy[(e + 1) % n]
        d = b - a
        ln = float(np.hypot(*d))
        f = a - w0
        A, B, Cc = d @ d, 2 * f @ d, f @ f - R * R
        disc = B * B - 4 * A * Cc
        if disc <= 0:
            continue
        sq = math.sqrt(disc)
        t0, t1 = max(0.0, (-B - sq) / (2 * A)), min(1.0, (-B + sq) / (2 * A))
        if t0 > t1:
            continue
        k = max(1, int(math.ceil((t1 - t0) * ln / step)))
        ts = np.linspace(t0, t1, k + 1)
        normal = np.array([d[1], -d[0]]) / ln  # CCW polygon: outward is the right normal
        pts.append(a + ts[:, None] * d)
        dirs.append(np.tile(normal, (len(ts), 1)))
    if not pts:
        return np.zeros((0, 2)), np.zeros((0, 2))
    P = np.concatenate(pts)
    D = np.concatenate(dirs)
    # vertices use the exterior bisector of the two adjacent edges
    prev = np.roll(xy, 1, axis=0)
    nxt = np.roll(xy, -1, axis=0)
    for k in np.nonzero(np.hypot(*(xy - w0).T) <= R)[0]:
        d1 = xy[k] - prev[k]
        d2 = nxt[k] - xy[k]
        n1 = np.array([d1[1], -d1[0]]) / np.hypot(*d1)
        n2 = np.array([d2[1], -d2[0]]) / np.hypot(*d2)
        bis = n1 + n2
        nb = np.hypot(*bis)
        bis = n1 if nb < 1e-12 else bis / nb
        hit = np.all(P == xy[k], axis=1)
        D[hit] = bis
    return P, D


def split_disk(Q: MarkedQuadrilateral, frame: ArcFrame, w0_s: float) -> SplitDisk:
    R, eps = frame.R, frame.epsilon
    w0 = frame.point_at(w0_s)
    s01, w01 = _first_crossing(frame, w0_s, -1)
    s02, w02 = _first_crossing(frame, w0_s, +1)
    arc = frame.subarc(s01, s02)
    inner = arc[1:-1]
    if len(inner) and not np.all(np.hypot(*(inner - w0).T) < R):
        raise DegenerateSplit("sub-arc touches the circle between its crossings")
    if np.allclose(w01, w02):
        raise DegenerateSplit("crossings coincide")
    a1 = math.atan2(*(w01 - w0)[::-1])
    a2 = math.atan2(*(w02 - w0)[::-1])
    th_plus = (a1 - a2) % (2 * math.pi)  # CCW from w02 to w01
    th_minus = (a2 - a1) % (2 * math.pi)
    Dplus = np.vstack([arc, _circle_arc(w0, R, a2, th_plus)])
    Dminus = np.vstack([arc[::-1], _circle_arc(w0, R, a1, th_minus)])

    P, N = _boundary_samples(Q, w0, R, R / 64)
    mu = max(R * 1e-6, 100 * Q.eta)
    if len(P):
        near = points_to_polyline_distance(P, arc) <= mu
        test = P.copy()
        test[near] += 2 * mu * N[near]
        in_plus = crossing_parity(Dplus, test)
    else:
        in_plus = np.zeros(0, dtype=bool)
    zone = lambda pts: (  # noqa: E731
        ((np.hypot(*(pts - w01).T) < 2 * eps) | (np.hypot(*(pts - w02).T) < 2 * eps))
        & (np.hypot(*(pts - w0).T) >= R - eps)
    )
    cls = {}
    for name, mask in (("plus", in_plus), ("minus", ~in_plus)):
        pts = P[mask]
        confined = bool(np.all(zone(pts))) if len(pts) else True
        cls[name] = {"n_points": int(len(pts)), "confined": confined}
    if not (cls["plus"]["confined"] or cls["minus"]["confined"]):
        raise ClassificationFailure(f"neither component is confined: {cls}")
    return SplitDisk(w0, w0_s, R, w01, w02, s01, s02, arc, Dplus, Dminus, {"plus": th_plus, "minus": th_minus}, cls)


# ---------------------------------------------------------------------------
# construction


def _hugs(arc_part, a, b, tol) -> bool:
    return bool(points_to_polyline_distance(arc_part, np.array([a, b])).max() <= tol)


def _left(d):
    return np.array([-d[1], d[0]])


def _tangent_disk(Q, frame, sd: SplitDisk, good: str, trace):
    r, eps = frame.r, frame.epsilon
    k0 = int(np.argmin(np.hypot(*(sd.arc - sd.w0).T)))
    halves = {
        "w01": (sd.arc[: k0 + 1], sd.w01, sd.w0),
        "w02": (sd.arc[k0:], sd.w02, sd.w0),
    }
    for name, (part, end, w0) in halves.items():
        if not _hugs(part, end, w0, 3 * eps):
            trace.setdefault("hug", {})[name] = False
            continue
        trace.setdefault("hug", {})[name] = True
        # direction of travel along C on this half-chord
        d = (w0 - end) if name == "w01" else (end - w0)
        d = d / np.hypot(*d)
        n = _left(d) if good == "plus" else -_left(d)
        toward = (w0 - end) / np.hypot(*(w0 - end))
        base = end + 2 * r * toward
        center = base + (3 * eps + r) * n
        trace["n0"] = (base + 3 * eps * n).tolist()
        if disk_fits(Q, center, r):
            return DiskCandidate(Point(float(center[0]), float(center[1])), r, TANGENT)
        trace.setdefault("rejected", []).append({"branch": TANGENT, "half": name, "center": center.tolist()})
    return None


def seven_disks(frame, sd: SplitDisk, good: str):
    """Centres of the seven radius-r disks internally tangent to the good arc."""
    r, R = frame.r, frame.R
    w0 = sd.w0
    theta = sd.theta[good]
    start = math.atan2(*(sd.w02 - w0)[::-1]) if good == "plus" else math.atan2(*(sd.w01 - w0)[::-1])
    ang = start + theta * np.arange(1, 8) / 8
    return w0 + (R - r) * np.column_stack([np.cos(ang), np.sin(ang)])


def _seven_arc(Q, frame, sd: SplitDisk, goods, trace):
    r = frame.r
    for good in sorted(goods, key=lambda g: -sd.theta[g]):
        centres = seven_disks(frame, sd, good)
        dist = points_to_polyline_distance(centres, sd.arc)
        fits = [bool(dist[j] > r and disk_fits(Q, centres[j], r)) for j in range(7)]
        trace.setdefault("seven", {})[good] = fits
        for j, ok in enumerate(fits):
            if ok:
                c = centres[j]
                trace["seven_index"] = j + 1
                return DiskCandidate(Point(float(c[0]), float(c[1])), r, SEVEN_ARC)
    return None


def construct_disk(Q: MarkedQuadrilateral, L: float, distances=None, w0_s: float | None = None) -> tuple[DiskCandidate, dict]:
    """Run the pipeline; always returns a verified disk plus the stage trace."""
    frame = build_arc_frame(Q, L, distances)
    trace: dict = {"frame": {k: v for k, v in frame.trace.items()}, "r": frame.r, "R": frame.R}
    if w0_s is None:
        w0_s = frame.length / 2
    trace["w0"] = frame.point_at(w0_s).tolist()
    found = None
    try:
        ok, detail = check_exits(frame, w0_s)
        trace["exits"] = {"ok": ok, **detail}
        sd = split_disk(Q, frame, w0_s)
        trace["split"] = {"classification": sd.classification, "theta": sd.theta}
        goods = sd.good()
        other = {"plus": "minus", "minus": "plus"}
        for g in goods:
            if sd.classification[other[g]]["n_points"] > 0:
                trace["branch_tried"] = TANGENT
                found = _tangent_disk(Q, frame, sd, g, trace)
                if found:
                    break
        if found is None:
            trace.setdefault("branch_tried", SEVEN_ARC)
            found = _seven_arc(Q, frame, sd, goods, trace)
    except (DegenerateSplit, ClassificationFailure) as exc:
        trace["error"] = f"{type(exc).__name__}: {exc}"
    if found is None:
        found = largest_inscribed_disk(Q)
        trace["fallback"] = True
    trace["branch"] = found.provenance
    return found, trace


# ---------------------------------------------------------------------------
# theorem check


@dataclass(frozen=True, eq=False)
class TheoremReport:
    required_radius: float
    found: DiskCandidate
    passed: bool
    pipeline_trace: dict
    mode: str
    constants: dict
    largest: DiskCandidate | None = None

    def to_json(self) -> dict:
        return {
            "required_radius": self.required_radius,
            "found": self.found.to_json(),
            "pass": self.passed,
            "mode": self.mode,
            "constants": self.constants,
            "largest": self.largest.to_json() if self.largest else None,
            "trace": _jsonable(self.pipeline_trace),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def _modulus_step(Q) -> float | None:
    """Coarsest power-of-two step dividing every coordinate with >= 64 cells across."""
    xy = np.vstack([Q.polygon.xy, Q.mark_points])
    span = float(np.ptp(xy, axis=0).max())
    h = 2.0 ** math.floor(math.log2(span / 64))
    for _ in range(40):
        if np.all(np.abs(xy / h - np.round(xy / h)) <= 1e-9 * np.maximum(1, np.abs(xy / h))):
            return h
        h /= 2
    return None


MAX_MODULUS_NODES = 2_000_000


def modulus_or_certificate(Q, sa, sb) -> dict:
    """Grid modulus when affordable; otherwise only the Rengel interval."""
    bounds = rengel_bounds(sa, sb)
    out = {"rengel": [bounds.lower, bounds.upper], "M": None, "err": None}
    if not Q.polygon.is_rectilinear():
        return out
    h = _modulus_step(Q)
    if h is None:
        return out
    x0, y0, x1, y1 = Q.polygon.bbox
    if (x1 - x0) / h * (y1 - y0) / h > MAX_MODULUS_NODES:
        return out
    res = modulus_extrapolated(Q, [2 * h, h])
    out.update(M=res.M, err=res.error_estimate, levels=res.levels)
    return out


def verify_theorem(Q: MarkedQuadrilateral, mode: str = "from_L", L: float | None = None, K: float | None = None) -> TheoremReport:
    sa, sb = side_distances(Q)
    ratio = max(sa / sb, sb / sa)
    constants: dict = {"s_a": sa, "s_b": sb, "ratio": ratio}
    if mode == "from_L":
        if L is None:
            L = ratio
        delta = 1 / (1000 * L)
        constants.update(L=L, delta=delta)
    elif mode == "from_K":
        if K is None:
            raise ValueError("from_K mode needs K")
        cert = modulus_or_certificate(Q, sa, sb)
        constants["modulus"] = cert
        lo, hi = 1 / K, K
        if cert["M"] is not None:
            M, err = cert["M"], cert["err"]
            if M + err < lo or M - err > hi:
                raise ModulusOutOfRange(M, K)
        else:
            rl, ru = cert["rengel"]
            if ru < lo or rl > hi:
                raise ModulusOutOfRange(ru if ru < lo else rl, K, f"certified modulus interval [{rl}, {ru}] misses [1/{K}, {K}]")
        Lt = ratio_bound_from_K(K)
        L = 3 * Lt
        delta_p = 1 / (1000 * L)
        delta = delta_p / 4
        constants.update(K=K, L_tilde=Lt, L=L, delta_prime=delta_p, delta=delta)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # the disk bound is applied to whichever of Q and its conjugate has the larger distance as its a-pair
    if sa >= sb:
        target, dist = Q, (sa, sb)
    else:
        target, dist = conjugate(Q), (sb, sa)
    constants["applied_to"] = "Q" if target is Q else "conjugate"
    required = delta * max(sa, sb)
    found, trace = construct_disk(target, L, dist)
    largest = largest_inscribed_disk(Q)
    ok = found.radius >= required - Q.eta and disk_fits(Q, np.array(found.center), found.radius)
    return TheoremReport(required, found, bool(ok), trace, mode, constants, largest)


__all__ = [
    "ArcFrame",
    "DiskCandidate",
    "SplitDisk",
    "TheoremReport",
    "build_arc_frame",
    "check_exits",
    "construct_disk",
    "disk_fits",
    "inscribed_oracle",
    "largest_inscribed_disk",
    "modulus_or_certificate",
    "seven_disks",
    "split_disk",
    "verify_theorem",
]
