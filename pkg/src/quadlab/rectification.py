"""Grid-square approximation of a polygonal quadrilateral by a rectilinear one.

The plane is covered by closed axis-parallel squares of side ``s``.  Cells
touching the boundary are removed; the 4-connected component of the
remaining cells that contains the pole of inaccessibility becomes the
approximating domain Q_tau.  Marks are transferred to the nearest boundary
point of Q_tau and the result is checked (containment, mark order, side
correspondence, internal-distance deviations) rather than certified by the
original conformal construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import CornerTouch, GridTooCoarse, InvalidMarks, InvalidPolygon, IterationCap
from .geom_core import (
    MarkedQuadrilateral,
    SideId,
    classify_points,
    crossing_parity,
    mark_quadrilateral,
    orient_many,
    points_to_polyline_distance,
    validate_polygon,
)
from .inscribed import largest_inscribed_disk_ring
from .internal_distance import side_distances

MAX_HALVINGS = 20


@dataclass(frozen=True)
class GridSpec:
    s: float
    ox: float = 0.0
    oy: float = 0.0

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("grid side must be positive")

    def cell_box(self, i, j):
        return (self.ox + i * self.s, self.oy + j * self.s, self.ox + (i + 1) * self.s, self.oy + (j + 1) * self.s)


@dataclass(frozen=True, eq=False)
class RectifiedQuad:
    quad: MarkedQuadrilateral
    s_used: float
    grid: GridSpec
    deviations: tuple[float, float]
    achieved_tau: float
    ratio_class: float
    source_distances: tuple[float, float]
    distances: tuple[float, float]
    cover: frozenset = field(default_factory=frozenset, repr=False)
    attempts: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "quad": self.quad.to_json(),
            "s": self.s_used,
            "origin": [self.grid.ox, self.grid.oy],
            "deviations": list(self.deviations),
            "achieved_tau": self.achieved_tau,
            "ratio_class": self.ratio_class,
            "s_a": self.distances[0],
            "s_b": self.distances[1],
            "source_s_a": self.source_distances[0],
            "source_s_b": self.source_distances[1],
        }


# ---------------------------------------------------------------------------
# cover


def _edge_cells(a, b, g: GridSpec):
    """Cells whose closed square meets the closed segment [a, b]."""
    s, ox, oy = g.s, g.ox, g.oy
    xlo, xhi = min(a[0], b[0]), max(a[0], b[0])
    ylo, yhi = min(a[1], b[1]), max(a[1], b[1])
    i0 = math.ceil((xlo - ox) / s) - 1
    i1 = math.floor((xhi - ox) / s)
    j0 = math.ceil((ylo - oy) / s) - 1
    j1 = math.floor((yhi - oy) / s)
    # candidates: per column, the y-range of the segment inside the column slab (+1 margin)
    ii, jj = [], []
    dx = b[0] - a[0]
    for i in range(i0, i1 + 1):
        cx0, cx1 = ox + i * s, ox + (i + 1) * s
        if dx != 0:
            t0 = (max(cx0, xlo) - a[0]) / dx
            t1 = (min(cx1, xhi) - a[0]) / dx
            y_a, y_b = a[1] + t0 * (b[1] - a[1]), a[1] + t1 * (b[1] - a[1])
            lo, hi = min(y_a, y_b), max(y_a, y_b)
            ja = max(j0, math.floor((lo - oy) / s) - 1)
            jb = min(j1, math.floor((hi - oy) / s) + 1)
        else:
            ja, jb = j0, j1
        for j in range(ja, jb + 1):
            ii.append(i)
            jj.append(j)
    if not ii:
        return []
    ii = np.array(ii)
    jj = np.array(jj)
    bx0, by0 = ox + ii * s, oy + jj * s
    bx1, by1 = ox + (ii + 1) * s, oy + (jj + 1) * s
    box_ok = (bx0 <= xhi) & (bx1 >= xlo) & (by0 <= yhi) & (by1 >= ylo)
    # closed box meets the supporting line unless all four corners are strictly on one side
    os_ = [orient_many(a[0], a[1], b[0], b[1], cx, cy) for cx, cy in ((bx0, by0), (bx1, by0), (bx1, by1), (bx0, by1))]
    O = np.stack(os_)
    line_ok = ~(np.all(O > 0, axis=0) | np.all(O < 0, axis=0))
    keep = box_ok & line_ok
    return list(zip(ii[keep].tolist(), jj[keep].tolist()))


def _segment_enters_open_box(a, b, box) -> bool:
    """Closed segment meets the open square (Liang-Barsky clip + midpoint test)."""
    x0, y0, x1, y1 = box
    t0, t1 = 0.0, 1.0
    d = b - a
    for p, q in ((-d[0], a[0] - x0), (d[0], x1 - a[0]), (-d[1], a[1] - y0), (d[1], y1 - a[1])):
        if p == 0:
            if q < 0:
                return False
        else:
            t = q / p
            if p < 0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
    if t0 > t1:
        return False
    m = a + 0.5 * (t0 + t1) * d
    return bool(x0 < m[0] < x1 and y0 < m[1] < y1)


def grid_cover(Q, spec: GridSpec, within: bool = True) -> frozenset:
    """Grid cells whose closed square meets the boundary of Q.

    With ``within`` (default) only cells that also reach into the interior of
    Q are kept; cells touching the boundary purely from outside never affect
    the approximation and are dropped from the reported set.
    """
    poly = getattr(Q, "polygon", Q)
    xy = poly.xy
    n = len(xy)
    touched: dict[tuple[int, int], list[int]] = {}
    for e in range(n):
        for c in _edge_cells(xy[e], xy[(e + 1) % n], spec):
            touched.setdefault(c, []).append(e)
    if not within:
        return frozenset(touched)
    keep = []
    cells = list(touched)
    centres = np.array([[spec.ox + (i + 0.5) * spec.s, spec.oy + (j + 0.5) * spec.s] for i, j in cells])
    inside = crossing_parity(xy, centres) if cells else np.zeros(0, bool)
    for k, c in enumerate(cells):
        if inside[k]:
            keep.append(c)
            continue
        box = spec.cell_box(*c)
        if any(_segment_enters_open_box(xy[e], xy[(e + 1) % n], box) for e in touched[c]):
            keep.append(c)
    return frozenset(keep)


# ---------------------------------------------------------------------------
# boundary extraction


def cells_to_polygon(mask: np.ndarray) -> list[tuple[int, int]]:
    """Counter-clockwise outer boundary (integer node coordinates) of a 4-connected cell mask.

    Raises :class:`CornerTouch` when the boundary touches itself at a grid
    node (two cells meeting only diagonally), since that boundary would not
    be a simple polygon.
    """
    m = np.asarray(mask, dtype=bool)
    pad = np.zeros((m.shape[0] + 2, m.shape[1] + 2), dtype=bool)
    pad[1:-1, 1:-1] = m
    nxt: dict[tuple[int, int], tuple[int, int]] = {}
    count = 0
    ci, cj = np.nonzero(m)
    for i, j in zip(ci.tolist(), cj.tolist()):
        pi, pj = i + 1, j + 1
        sides = []
        if not pad[pi, pj - 1]:
            sides.append(((i, j), (i + 1, j)))
        if not pad[pi + 1, pj]:
            sides.append(((i + 1, j), (i + 1, j + 1)))
        if not pad[pi, pj + 1]:
            sides.append(((i + 1, j + 1), (i, j + 1)))
        if not pad[pi - 1, pj]:
            sides.append(((i, j + 1), (i, j)))
        for a, b in sides:
            if a in nxt:
                raise CornerTouch(f"cell boundary touches itself at node {a}")
            nxt[a] = b
            count += 1
    if not nxt:
        raise GridTooCoarse("empty cell set")
    start = min(nxt)
    cyc = [start]
    cur = nxt[start]
    while cur != start:
        cyc.append(cur)
        cur = nxt[cur]
        if len(cyc) > count:
            raise GridTooCoarse("boundary tracing did not close")
    if len(cyc) != count:
        raise GridTooCoarse("cell set has more than one boundary cycle (hole?)")
    # merge collinear runs
    out = []
    k = len(cyc)
    for idx in range(k):
        p, c, q = cyc[idx - 1], cyc[idx], cyc[(idx + 1) % k]
        if (c[0] - p[0]) * (q[1] - c[1]) - (c[1] - p[1]) * (q[0] - c[0]) != 0:
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# rectify


def pole_of_inaccessibility(Q) -> tuple[np.ndarray, float]:
    poly = getattr(Q, "polygon", Q)
    return largest_inscribed_disk_ring(poly.xy)


def _hausdorff_ok(sampled_from, target, thr) -> bool:
    if len(sampled_from) == 0:
        return True
    return bool(points_to_polyline_distance(sampled_from, target).max() <= thr)


def _sample_polyline(poly, step):
    pts = [poly[:1]]
    for a, b in zip(poly[:-1], poly[1:]):
        l = float(np.hypot(*(b - a)))
        k = max(1, int(math.ceil(l / step)))
        t = np.linspace(0, 1, k + 1)[1:]
        pts.append(a + t[:, None] * (b - a))
    return np.concatenate(pts)


def rectify(Q: MarkedQuadrilateral, spec: GridSpec, pole=None, source_distances=None, compute_deviation=True) -> RectifiedQuad:
    s = spec.s
    xy = Q.polygon.xy
    cover = grid_cover(Q, spec, within=False)
    x0, y0 = xy.min(axis=0)
    x1, y1 = xy.max(axis=0)
    i0 = math.floor((x0 - spec.ox) / s) - 1
    j0 = math.floor((y0 - spec.oy) / s) - 1
    i1 = math.floor((x1 - spec.ox) / s) + 1
    j1 = math.floor((y1 - spec.oy) / s) + 1
    nx, ny = i1 - i0 + 1, j1 - j0 + 1
    if nx * ny > 40_000_000:
        raise GridTooCoarse(f"grid of {nx}x{ny} cells is too large")
    ci = spec.ox + (np.arange(i0, i1 + 1) + 0.5) * s
    cj = spec.oy + (np.arange(j0, j1 + 1) + 0.5) * s
    gx, gy = np.meshgrid(ci, cj, indexing="ij")
    free = crossing_parity(xy, np.column_stack([gx.ravel(), gy.ravel()])).reshape(nx, ny)
    if cover:
        cc = np.array(sorted(cover))
        free[cc[:, 0] - i0, cc[:, 1] - j0] = False

    if pole is None:
        pole = pole_of_inaccessibility(Q)[0]
    pi = math.floor((pole[0] - spec.ox) / s) - i0
    pj = math.floor((pole[1] - spec.oy) / s) - j0
    if not free[pi, pj]:
        raise GridTooCoarse("the cell of the pole of inaccessibility touches the boundary")
    labels, _ = ndimage.label(free)  # default structure is 4-connectivity
    comp = labels == labels[pi, pj]
    comp = ndimage.binary_fill_holes(comp)
    nodes = cells_to_polygon(comp)
    verts = [(spec.ox + (i + i0) * s, spec.oy + (j + j0) * s) for i, j in nodes]
    try:
        poly = validate_polygon(verts)
    except InvalidPolygon as exc:
        raise GridTooCoarse(f"extracted boundary invalid: {exc}") from exc

    # containment: vertices and boundary samples at step s/4 must not be outside Q
    samples = _sample_polyline(np.vstack([poly.xy, poly.xy[:1]]), s / 4)
    if np.any(classify_points(xy, samples, 0.0) < 0):
        raise GridTooCoarse("approximation leaves the polygon")

    # transfer marks
    marks = [poly.nearest_location(v) for v in Q.mark_points]
    try:
        Qt = mark_quadrilateral(poly, marks)
    except InvalidMarks as exc:
        raise GridTooCoarse(f"mark transfer failed: {exc}") from exc

    # side correspondence
    dcheck = 10 * s
    thr = 3 * s + 2 * dcheck
    V = Q.mark_points
    for side in SideId:
        src = Q.side_arc(side)
        dst = Qt.side_arc(side)
        pts = _sample_polyline(src, s / 2)
        j = side.value
        far = (np.hypot(*(pts - V[j]).T) >= 2 * dcheck) & (np.hypot(*(pts - V[(j + 1) % 4]).T) >= 2 * dcheck)
        if not _hausdorff_ok(pts[far], dst, thr) or not _hausdorff_ok(_sample_polyline(dst, s / 2), src, thr):
            raise GridTooCoarse(f"side {side.name} of the approximation strays from the original side")

    if source_distances is None:
        source_distances = side_distances(Q)
    sa, sb = source_distances
    if compute_deviation:
        ta, tb = side_distances(Qt)
    else:
        ta, tb = float("nan"), float("nan")
    dev = (abs(ta - sa), abs(tb - sb))
    tau = max(dev) / min(sa, sb)
    ratio = max(sa / sb, sb / sa)
    ratio_class = (1 + tau) / (1 - tau) * ratio if tau < 1 else float("inf")
    return RectifiedQuad(Qt, s, spec, dev, tau, ratio_class, (sa, sb), (ta, tb), frozenset(cover))


def rectify_to_tolerance(Q: MarkedQuadrilateral, tau: float, max_halvings: int = MAX_HALVINGS) -> RectifiedQuad:
    """Halve the grid side until both deviations are at most ``tau * min(s_a, s_b)``."""
    if not 0 < tau <= 0.5:
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    pole, rad = pole_of_inaccessibility(Q)
    sd = side_distances(Q)
    s = rad / 8
    x0, y0 = Q.polygon.xy.min(axis=0)
    attempts = []
    for level in range(max_halvings + 1):
        for jitter in range(3):
            spec = GridSpec(s, x0 + jitter * s / 3, y0 + jitter * s / 3)
            try:
                res = rectify(Q, spec, pole=pole, source_distances=sd)
            except CornerTouch as exc:
                attempts.append((s, jitter, f"corner touch: {exc}"))
                continue
            except GridTooCoarse as exc:
                attempts.append((s, jitter, str(exc)))
                break
            attempts.append((s, jitter, f"tau={res.achieved_tau:.4g}"))
            if res.achieved_tau <= tau:
                return RectifiedQuad(**{**res.__dict__, "attempts": attempts})
            break
        s /= 2
    raise IterationCap(f"no admissible grid after {max_halvings} halvings; last attempts: {attempts[-3:]}")
