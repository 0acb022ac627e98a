"""Planar primitives: simple polygons, marked quadrilaterals, and the
containment / distance queries everything else is built on.

Orientation decisions go through :func:`orient`, a filtered predicate that
falls back to rational arithmetic whenever the floating point sign is not
certified, so the reported sign is the sign of the exact determinant of the
double-precision inputs.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateEdge,
    InputError,
    InvalidPolygon,
    MarksNotDistinct,
    MarksOutOfOrder,
    SelfIntersection,
)

# Shewchuk's ccwerrboundA
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0**-53) * 2.0**-53

# fuzzy comparisons use ETA_REL * (bounding-box diagonal)
ETA_REL = 1e-9

INSIDE, BOUNDARY, OUTSIDE = "inside", "boundary", "outside"


class Point(NamedTuple):
    x: float
    y: float


class BoundaryLocation(NamedTuple):
    edge: int
    t: float


class SideId(enum.Enum):
    A1 = 0
    B1 = 1
    A2 = 2
    B2 = 3

    @property
    def pair(self) -> str:
        return "A" if self in (SideId.A1, SideId.A2) else "B"


PAIRS = {"A": (SideId.A1, SideId.A2), "B": (SideId.B1, SideId.B2)}


def pair_sides(pair: str) -> tuple[SideId, SideId]:
    try:
        return PAIRS[pair.upper()]
    except (KeyError, AttributeError):
        raise ValueError(f"pair must be 'A' or 'B', got {pair!r}") from None


# ---------------------------------------------------------------------------
# predicates


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orient(a, b, c) -> int:
    """Sign of the exact determinant |b-a, c-a|: +1 left turn, -1 right, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    # differing (or zero) product signs cannot cancel
    if (left > 0 and right > 0) or (left < 0 and right < 0):
        if abs(det) <= _CCW_ERRBOUND * (abs(left) + abs(right)):
            return _orient_exact(ax, ay, bx, by, cx, cy)
    return (det > 0) - (det < 0)


_SPLITTER = 134217729.0  # 2**27 + 1


def _diff_err(a, b):
    x = a - b
    bv = a - x
    av = x + bv
    return (a - av) + (bv - b)


def _prod_err(a, b):
    p = a * b
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _exact_terms(ax, ay, bx, by, cx, cy) -> np.ndarray:
    """True where the two products of the 2x2 determinant are computed exactly."""
    with np.errstate(all="ignore"):
        ok = (_diff_err(bx, ax) == 0) & (_diff_err(cy, ay) == 0)
        ok &= (_diff_err(by, ay) == 0) & (_diff_err(cx, ax) == 0)
        ok &= (_prod_err(bx - ax, cy - ay) == 0) & (_prod_err(by - ay, cx - ax) == 0)
    return ok


def orient_many(ax, ay, bx, by, cx, cy) -> np.ndarray:
    """Vectorised :func:`orient` with numpy broadcasting; returns int8 signs."""
    ax, ay, bx, by, cx, cy = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (ax, ay, bx, by, cx, cy))
    )
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    sign = np.sign(det).astype(np.int8)
    same = ((left > 0) & (right > 0)) | ((left < 0) & (right < 0))
    unsure = same & (np.abs(det) <= _CCW_ERRBOUND * (np.abs(left) + np.abs(right)))
    if unsure.any():
        # second stage: if every difference and product was exact, so is the sign
        u = np.nonzero(unsure)
        exact = _exact_terms(ax[u], ay[u], bx[u], by[u], cx[u], cy[u])
        unsure[tuple(i[exact] for i in u)] = False
        for idx in zip(*np.nonzero(unsure)):
            sign[idx] = _orient_exact(ax[idx], ay[idx], bx[idx], by[idx], cx[idx], cy[idx])
    return sign


def _on_closed_segment(p, a, b) -> bool:
    return (
        orient(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(a, b, c, d) -> bool:
    """Closed segments [a,b] and [c,d] share at least one point (exact)."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and _on_closed_segment(c, a, b))
        or (o2 == 0 and _on_closed_segment(d, a, b))
        or (o3 == 0 and _on_closed_segment(a, c, d))
        or (o4 == 0 and _on_closed_segment(b, c, d))
    )


# ---------------------------------------------------------------------------
# distances (vectorised)


def point_segment_distance(px, py, ax, ay, bx, by) -> np.ndarray:
    """Distance from points (px, py) to segments [a, b], broadcasting."""
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((px - ax) * dx + (py - ay) * dy) / ll
    t = np.where(ll > 0, np.clip(t, 0.0, 1.0), 0.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def points_to_polyline_distance(pts, poly, closed=False, chunk=2_000_000) -> np.ndarray:
    """Minimum distance from each point to a polyline (or closed ring)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    if len(poly) == 1:
        return np.hypot(pts[:, 0] - poly[0, 0], pts[:, 1] - poly[0, 1])
    a = poly if closed else poly[:-1]
    b = np.roll(poly, -1, axis=0) if closed else poly[1:]
    out = np.empty(len(pts))
    step = max(1, chunk // max(1, len(a)))
    for s in range(0, len(pts), step):
        p = pts[s : s + step]
        d = point_segment_distance(
            p[:, 0:1], p[:, 1:2], a[None, :, 0], a[None, :, 1], b[None, :, 0], b[None, :, 1]
        )
        out[s : s + step] = d.min(axis=1)
    return out


def _segment_segment_distance(a, b, c, d) -> float:
    if segments_intersect(a, b, c, d):
        return 0.0
    return float(
        min(
            point_segment_distance(a[0], a[1], c[0], c[1], d[0], d[1]),
            point_segment_distance(b[0], b[1], c[0], c[1], d[0], d[1]),
            point_segment_distance(c[0], c[1], a[0], a[1], b[0], b[1]),
            point_segment_distance(d[0], d[1], a[0], a[1], b[0], b[1]),
        )
    )


def arc_diameter(polyline) -> float:
    """Euclidean diameter of a polyline (attained at vertices)."""
    p = np.atleast_2d(np.asarray(polyline, dtype=float))
    if len(p) < 2:
        return 0.0
    diff = p[:, None, :] - p[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def side_set_distance(p1, p2) -> float:
    """Euclidean distance between two polylines, exact up to rounding."""
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    p2 = np.atleast_2d(np.asarray(p2, dtype=float))
    if len(p1) == 1 or len(p2) == 1:
        pt, other = (p1, p2) if len(p1) == 1 else (p2, p1)
        return float(points_to_polyline_distance(pt, other).min())
    # cheap lower bound on candidates via vertex distances, then exact pairs
    best = min(
        float(points_to_polyline_distance(p1, p2).min()),
        float(points_to_polyline_distance(p2, p1).min()),
    )
    if best == 0.0:
        return 0.0
    # only a proper crossing can beat the vertex-to-segment distances
    for i in range(len(p1) - 1):
        a, b = p1[i], p1[i + 1]
        for j in range(len(p2) - 1):
            if segments_intersect(a, b, p2[j], p2[j + 1]):
                return 0.0
    return best


def polyline_length(poly) -> float:
    p = np.asarray(poly, dtype=float)
    if len(p) < 2:
        return 0.0
    return float(np.hypot(*np.diff(p, axis=0).T).sum())


# ---------------------------------------------------------------------------
# polygons


@dataclass(frozen=True, eq=False)
class SimplePolygon:
    """Counter-clockwise simple polygon. Build through :func:`validate_polygon`."""

    vertices: tuple[Point, ...]

    def __eq__(self, other):
        return isinstance(other, SimplePolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def xy(self) -> np.ndarray:
        a = np.array(self.vertices, dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def area(self) -> float:
        x, y = self.xy[:, 0], self.xy[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*(np.roll(self.xy, -1, axis=0) - self.xy).T)

    @cached_property
    def cumlength(self) -> np.ndarray:
        """Arclength at the start of each edge; last entry is the perimeter."""
        return np.concatenate([[0.0], np.cumsum(self.edge_lengths)])

    @property
    def perimeter(self) -> float:
        return float(self.cumlength[-1])

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        lo, hi = self.xy.min(axis=0), self.xy.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    @property
    def diag(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def eta(self) -> float:
        return ETA_REL * self.diag

    def edge(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.xy[i % self.n], self.xy[(i + 1) % self.n]

    def is_rectilinear(self) -> bool:
        d = np.roll(self.xy, -1, axis=0) - self.xy
        return bool(np.all((d[:, 0] == 0) | (d[:, 1] == 0)))

    def reflex_mask(self) -> np.ndarray:
        prev = np.roll(self.xy, 1, axis=0)
        nxt = np.roll(self.xy, -1, axis=0)
        s = orient_many(prev[:, 0], prev[:, 1], self.xy[:, 0], self.xy[:, 1], nxt[:, 0], nxt[:, 1])
        return s < 0

    def point_at(self, loc: BoundaryLocation) -> np.ndarray:
        a, b = self.edge(loc.edge)
        if loc.t == 0:
            return a.copy()
        return a + loc.t * (b - a)

    def param(self, loc: BoundaryLocation) -> float:
        return float(self.cumlength[loc.edge] + loc.t * self.edge_lengths[loc.edge])

    def location_at_param(self, s: float) -> BoundaryLocation:
        s = s % self.perimeter
        e = int(np.searchsorted(self.cumlength, s, side="right") - 1)
        e = min(max(e, 0), self.n - 1)
        t = (s - self.cumlength[e]) / self.edge_lengths[e]
        if t >= 1.0:
            e, t = (e + 1) % self.n, 0.0
        return BoundaryLocation(e, float(max(t, 0.0)))

    def nearest_location(self, p) -> BoundaryLocation:
        """Boundary location closest to ``p``; ties go to the smallest parameter."""
        a = self.xy
        b = np.roll(a, -1, axis=0)
        d = b - a
        ll = (d**2).sum(1)
        t = np.clip(((p[0] - a[:, 0]) * d[:, 0] + (p[1] - a[:, 1]) * d[:, 1]) / ll, 0.0, 1.0)
        dist = np.hypot(p[0] - (a[:, 0] + t * d[:, 0]), p[1] - (a[:, 1] + t * d[:, 1]))
        best = dist.min()
        cands = np.nonzero(dist <= best + 1e-15 * max(1.0, self.diag))[0]
        locs = []
        for e in cands:
            te = float(t[e])
            loc = BoundaryLocation((int(e) + 1) % self.n, 0.0) if te >= 1.0 else BoundaryLocation(int(e), te)
            locs.append((self.param(loc), loc))
        return min(locs)[1]

    def classify(self, pts, tol: float | None = None) -> np.ndarray:
        """+1 inside, 0 boundary, -1 outside for each point; ``tol`` widens the boundary band."""
        return classify_points(self.xy, pts, self.eta if tol is None else tol)

    def to_json(self) -> list:
        return [[float(x), float(y)] for x, y in self.vertices]


def _parity(px, py, ax, ay, bx, by) -> np.ndarray:
    cond = (ay > py) != (by > py)
    with np.errstate(invalid="ignore", divide="ignore"):
        xint = ax + (py - ay) * (bx - ax) / (by - ay)
    return (np.count_nonzero(cond & (px < xint), axis=1) % 2) == 1


def crossing_parity(ring, pts, chunk: int = 4_000_000) -> np.ndarray:
    """Even-odd inside test without any boundary handling (cheap)."""
    ring = np.asarray(ring, dtype=float)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    b = np.roll(ring, -1, axis=0)
    out = np.empty(len(pts), dtype=bool)
    step = max(1, chunk // len(ring))
    for s in range(0, len(pts), step):
        p = pts[s : s + step]
        out[s : s + step] = _parity(
            p[:, 0:1], p[:, 1:2], ring[None, :, 0], ring[None, :, 1], b[None, :, 0], b[None, :, 1]
        )
    return out


def classify_points(ring, pts, tol: float = 0.0, chunk: int = 2_000_000) -> np.ndarray:
    """Crossing-number classification of many points against a closed ring.

    Points within ``tol`` of the ring are reported as boundary (0).  With
    ``tol == 0`` the boundary test is the exact on-segment predicate.
    """
    ring = np.asarray(ring, dtype=float)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a = ring
    b = np.roll(ring, -1, axis=0)
    out = np.empty(len(pts), dtype=np.int8)
    step = max(1, chunk // max(1, len(a)))
    for s in range(0, len(pts), step):
        p = pts[s : s + step]
        px, py = p[:, 0:1], p[:, 1:2]
        ax, ay, bx, by = a[None, :, 0], a[None, :, 1], b[None, :, 0], b[None, :, 1]
        res = np.where(_parity(px, py, ax, ay, bx, by), 1, -1).astype(np.int8)
        if tol > 0:
            d = point_segment_distance(px, py, ax, ay, bx, by).min(axis=1)
            res[d <= tol] = 0
        else:
            # exact on-segment test, only for points with a zero-distance candidate
            d = point_segment_distance(px, py, ax, ay, bx, by)
            near = np.nonzero(d.min(axis=1) <= 1e-12 * max(1.0, float(np.abs(ring).max())))[0]
            for k in near:
                q = p[k]
                for e in np.nonzero(d[k] <= d[k].min() * 2 + 1e-300)[0]:
                    if _on_closed_segment(q, a[e], b[e]):
                        res[k] = 0
                        break
        out[s : s + step] = res
    return out


def _collapse(vertices) -> list[tuple[float, float]]:
    pts = [(float(p[0]), float(p[1])) for p in vertices]
    out: list[tuple[float, float]] = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _find_self_intersection(xy: np.ndarray) -> tuple[int, int] | None:
    n = len(xy)
    a = xy
    b = np.roll(xy, -1, axis=0)
    # bounding-box prefilter, then exact test on surviving pairs
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    i, j = np.triu_indices(n, k=1)
    ov = (
        (lo[i, 0] <= hi[j, 0])
        & (lo[j, 0] <= hi[i, 0])
        & (lo[i, 1] <= hi[j, 1])
        & (lo[j, 1] <= hi[i, 1])
    )
    i, j = i[ov], j[ov]
    adjacent = (j == i + 1) | ((i == 0) & (j == n - 1))
    for ii, jj in zip(i[~adjacent], j[~adjacent]):
        if segments_intersect(a[ii], b[ii], a[jj], b[jj]):
            return int(ii), int(jj)
    # adjacent edges may only share their common vertex
    for ii, jj in zip(i[adjacent], j[adjacent]):
        if jj == ii + 1:
            p, q, r = a[ii], a[jj], b[jj]
        else:
            p, q, r = a[jj], a[ii], b[ii]
        if orient(p, q, r) == 0:
            # collinear: folding back onto itself?
            if (q[0] - p[0]) * (r[0] - q[0]) + (q[1] - p[1]) * (r[1] - q[1]) < 0:
                return int(ii), int(jj)
    return None


def validate_polygon(vertices: Iterable) -> SimplePolygon:
    """Normalise a vertex list into a counter-clockwise :class:`SimplePolygon`.

    Consecutive duplicates (and a repeated closing vertex) are collapsed;
    clockwise input is reversed silently.
    """
    raw = list(vertices)
    for p in raw:
        if len(p) != 2 or not all(math.isfinite(float(c)) for c in p):
            raise InvalidPolygon(f"non-finite or malformed vertex {p!r}")
    pts = _collapse(raw)
    if len(pts) < 3:
        raise DegenerateEdge("fewer than three distinct vertices")
    xy = np.array(pts, dtype=float)
    hit = _find_self_intersection(xy)
    if hit is not None:
        raise SelfIntersection(*hit)
    x, y = xy[:, 0], xy[:, 1]
    area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if area == 0:
        raise DegenerateEdge("polygon has zero area")
    if area < 0:
        pts = pts[::-1]
    return SimplePolygon(tuple(Point(*p) for p in pts))


# ---------------------------------------------------------------------------
# marked quadrilaterals


@dataclass(frozen=True)
class RefinedBoundary:
    """The polygon with the four marks inserted as vertices.

    ``orig_edge[k]``/``t0[k]``/``t1[k]`` map refined edge ``k`` back to the
    original edge parameter range.
    """

    xy: np.ndarray
    mark_index: tuple[int, int, int, int]
    orig_edge: np.ndarray
    t0: np.ndarray
    t1: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xy)

    def side_edges(self, side: SideId) -> list[int]:
        j = side.value
        start, stop = self.mark_index[j], self.mark_index[(j + 1) % 4]
        out, k = [], start
        while k != stop:
            out.append(k)
            k = (k + 1) % self.n
        return out

    def side_vertices(self, side: SideId) -> list[int]:
        e = self.side_edges(side)
        return e + [(e[-1] + 1) % self.n]

    def location(self, k: int, u: float) -> BoundaryLocation:
        """Original boundary location of the point at fraction ``u`` along refined edge ``k``."""
        t = self.t0[k] + u * (self.t1[k] - self.t0[k])
        if t >= 1.0:
            return BoundaryLocation(int((self.orig_edge[k] + 1) % self._n_orig), 0.0)
        return BoundaryLocation(int(self.orig_edge[k]), float(t))

    _n_orig: int = 0


@dataclass(frozen=True, eq=False)
class MarkedQuadrilateral:
    polygon: SimplePolygon
    marks: tuple[BoundaryLocation, BoundaryLocation, BoundaryLocation, BoundaryLocation]

    def __eq__(self, other):
        return (
            isinstance(other, MarkedQuadrilateral)
            and self.polygon == other.polygon
            and self.marks == other.marks
        )

    def __hash__(self):
        return hash((self.polygon, self.marks))

    @cached_property
    def mark_points(self) -> np.ndarray:
        return np.array([self.polygon.point_at(m) for m in self.marks])

    @cached_property
    def mark_params(self) -> tuple[float, ...]:
        return tuple(self.polygon.param(m) for m in self.marks)

    @property
    def eta(self) -> float:
        return self.polygon.eta

    @cached_property
    def refined(self) -> RefinedBoundary:
        poly = self.polygon
        by_edge: dict[int, list[tuple[float, int]]] = {}
        for j, m in enumerate(self.marks):
            by_edge.setdefault(m.edge, []).append((m.t, j))
        xy, oe, t0 = [], [], []
        mark_index = [0, 0, 0, 0]
        for e in range(poly.n):
            a, b = poly.edge(e)
            ts = sorted(by_edge.get(e, []))
            if not ts or ts[0][0] != 0.0:
                xy.append(a)
                oe.append(e)
                t0.append(0.0)
            for t, j in ts:
                mark_index[j] = len(xy)
                xy.append(a if t == 0.0 else a + t * (b - a))
                oe.append(e)
                t0.append(t)
        xy = np.array(xy, dtype=float)
        oe = np.array(oe)
        t0 = np.array(t0)
        t1 = np.where(np.roll(oe, -1) == oe, np.roll(t0, -1), 1.0)
        rb = RefinedBoundary(xy, tuple(mark_index), oe, t0, t1, _n_orig=poly.n)
        return rb

    def side_arc(self, side: SideId) -> np.ndarray:
        rb = self.refined
        return rb.xy[rb.side_vertices(side)]

    def to_json(self) -> dict:
        return {
            "vertices": self.polygon.to_json(),
            "marks": [{"edge": m.edge, "t": float(m.t)} for m in self.marks],
        }


def mark_quadrilateral(p: SimplePolygon, marks: Sequence) -> MarkedQuadrilateral:
    """Attach four boundary marks v1..v4 to ``p`` after validating them."""
    if len(marks) != 4:
        raise MarksNotDistinct(f"need four marks, got {len(marks)}")
    locs = []
    for m in marks:
        e, t = (m["edge"], m["t"]) if isinstance(m, dict) else (m[0], m[1])
        e, t = int(e), float(t)
        if not 0 <= e < p.n:
            raise MarksOutOfOrder(f"edge index {e} out of range")
        if not (0.0 <= t < 1.0) or not math.isfinite(t):
            raise MarksOutOfOrder(f"edge parameter {t} not in [0, 1)")
        locs.append(BoundaryLocation(e, t))
    params = [p.param(m) for m in locs]
    pts = [tuple(p.point_at(m)) for m in locs]
    if len(set(pts)) < 4 or len(set(locs)) < 4:
        raise MarksNotDistinct("marked points must be pairwise distinct")
    descents = sum(params[(i + 1) % 4] < params[i] for i in range(4))
    if descents != 1:
        raise MarksOutOfOrder("marks are not in counter-clockwise boundary order")
    return MarkedQuadrilateral(p, tuple(locs))


def side_arc(Q: MarkedQuadrilateral, s: SideId) -> np.ndarray:
    """Closed polyline of side ``s`` from its first mark to its second."""
    return Q.side_arc(s)


def _ring(obj) -> np.ndarray:
    if isinstance(obj, MarkedQuadrilateral):
        return obj.polygon.xy
    if isinstance(obj, SimplePolygon):
        return obj.xy
    return np.asarray(obj, dtype=float)


def contains_point(Q, p, tol: float = 0.0) -> str:
    """Classify ``p`` as inside / boundary / outside of the closed polygon."""
    c = int(classify_points(_ring(Q), [p], tol)[0])
    return {1: INSIDE, 0: BOUNDARY, -1: OUTSIDE}[c]


def distance_to_boundary(Q, p) -> float:
    return float(points_to_polyline_distance([p], _ring(Q), closed=True)[0])


def distances_to_boundary(Q, pts) -> np.ndarray:
    return points_to_polyline_distance(pts, _ring(Q), closed=True)


def is_rectilinear(Q) -> bool:
    poly = Q.polygon if isinstance(Q, MarkedQuadrilateral) else Q
    return poly.is_rectilinear()


# ---------------------------------------------------------------------------
# JSON


def quad_from_json(data) -> MarkedQuadrilateral:
    """Parse ``{"vertices": [[x, y], ...], "marks": [{"edge": i, "t": f}, ...]}``.

    Vertex order is normalised to counter-clockwise; marks given against a
    clockwise vertex list are remapped onto the reversed polygon.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or "vertices" not in data or "marks" not in data:
        raise InputError("expected an object with 'vertices' and 'marks'")
    verts = data["vertices"]
    try:
        raw = [(float(x), float(y)) for x, y in verts]
    except (TypeError, ValueError) as exc:
        raise InvalidPolygon(f"malformed vertices: {exc}") from None
    poly = validate_polygon(raw)
    marks = data["marks"]
    if not isinstance(marks, list) or len(marks) != 4:
        raise MarksNotDistinct("expected exactly four marks")
    points = []
    for m in marks:
        try:
            e, t = int(m["edge"]), float(m["t"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"malformed mark {m!r}") from None
        if not 0 <= e < len(raw) or not 0.0 <= t < 1.0:
            raise MarksOutOfOrder(f"mark {m!r} out of range")
        a = np.array(raw[e])
        b = np.array(raw[(e + 1) % len(raw)])
        points.append(a if t == 0 else a + t * (b - a))
    raw_c = _collapse(raw)
    if poly.vertices == tuple(Point(*p) for p in raw_c):
        locs = [(int(m["edge"]), float(m["t"])) for m in marks]
        if len(raw_c) != len(raw):
            locs = [tuple(poly.nearest_location(pt)) for pt in points]
        return mark_quadrilateral(poly, locs)
    # orientation was reversed: relocate marks geometrically
    return mark_quadrilateral(poly, [tuple(poly.nearest_location(pt)) for pt in points])


def load_quad(path) -> MarkedQuadrilateral:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
    return quad_from_json(data)


def quad_from_points(vertices, mark_points) -> MarkedQuadrilateral:
    """Convenience constructor: marks given as boundary points instead of locations."""
    poly = validate_polygon(vertices)
    locs = []
    for pt in mark_points:
        loc = poly.nearest_location(np.asarray(pt, dtype=float))
        if np.hypot(*(poly.point_at(loc) - np.asarray(pt, dtype=float))) > 10 * poly.eta:
            raise MarksOutOfOrder(f"mark {pt} is not on the boundary")
        locs.append(loc)
    return mark_quadrilateral(poly, locs)
