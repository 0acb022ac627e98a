"""Instance generators: random rectilinear blobs and the pinch family."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import CornerTouch, GenerationFailed, InvalidParams
from .geom_core import MarkedQuadrilateral, mark_quadrilateral, validate_polygon
from .rectification import cells_to_polygon

_FOUR = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class GeneratorParams:
    seed: int = 1
    n: int = 16
    cells: int = 60
    marks: str = "quantile"  # or "corners" (marks at bounding-box extreme vertices)
    max_steps: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParams("grid must be at least 2x2")
        if not 1 <= self.cells <= self.n * self.n:
            raise InvalidParams(f"cell count {self.cells} does not fit an {self.n}x{self.n} grid")
        if self.marks not in ("quantile", "corners"):
            raise InvalidParams(f"unknown mark policy {self.marks!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must be a 64-bit unsigned integer")


def _pinched(mask, i, j) -> bool:
    """Would cell (i, j) create a diagonal-only contact in one of its 2x2 windows?"""
    n0, n1 = mask.shape
    for di in (-1, 0):
        for dj in (-1, 0):
            a, b = i + di, j + dj
            if a < 0 or b < 0 or a + 1 >= n0 or b + 1 >= n1:
                continue
            w = mask[a : a + 2, b : b + 2]
            if w[0, 0] == w[1, 1] and w[0, 1] == w[1, 0] and w[0, 0] != w[0, 1]:
                return True
    return False


def _has_hole(mask) -> bool:
    pad = np.pad(~mask, 1, constant_values=True)
    _, k = ndimage.label(pad)
    return k > 1


def grow_blob(params: GeneratorParams) -> np.ndarray:
    rng = np.random.default_rng(params.seed)
    n = params.n
    mask = np.zeros((n, n), dtype=bool)
    cur = (n // 2, n // 2)
    mask[cur] = True
    count = 1
    cap = params.max_steps or 200 * n * n
    for _ in range(cap):
        if count >= params.cells:
            return mask
        di, dj = _FOUR[rng.integers(4)]
        nxt = (cur[0] + di, cur[1] + dj)
        if not (0 <= nxt[0] < n and 0 <= nxt[1] < n):
            continue
        if not mask[nxt]:
            mask[nxt] = True
            if _pinched(mask, *nxt) or _has_hole(mask):
                mask[nxt] = False
                # restart the walk from a random blob cell to avoid getting stuck
                cells = np.argwhere(mask)
                cur = tuple(cells[rng.integers(len(cells))])
                continue
            count += 1
        cur = nxt
    raise GenerationFailed(f"seed {params.seed}: blob stuck at {count}/{params.cells} cells")


def _place_marks(poly, params: GeneratorParams, rng) -> list:
    P = poly.perimeter
    if params.marks == "corners":
        xy = poly.xy
        keys = [
            lambda p: (p[0] + p[1], p[1]),  # lower-left
            lambda p: (-p[0] + p[1], p[1]),  # lower-right
            lambda p: (-p[0] - p[1], -p[1]),  # upper-right
            lambda p: (p[0] - p[1], -p[1]),  # upper-left
        ]
        idx = [min(range(len(xy)), key=lambda k: key(xy[k])) for key in keys]
        start = idx[0]
        idx = sorted(idx, key=lambda k: (k - start) % len(xy))
        params_ = [poly.cumlength[k] for k in idx]
    else:
        q = float(rng.random())
        params_ = [float(round(((q + k / 4) % 1.0) * P)) % P for k in range(4)]
    return [poly.location_at_param(s) for s in params_]


def generate_random_rectilinear(params: GeneratorParams, retries: int = 20) -> MarkedQuadrilateral:
    last = None
    for attempt in range(retries):
        p = params if attempt == 0 else GeneratorParams(
            (params.seed * 1_000_003 + attempt) % 2**64, params.n, params.cells, params.marks, params.max_steps
        )
        try:
            mask = grow_blob(p)
            nodes = cells_to_polygon(mask)
            poly = validate_polygon([(float(i), float(j)) for i, j in nodes])
            rng = np.random.default_rng([p.seed, 1])
            return mark_quadrilateral(poly, _place_marks(poly, p, rng))
        except (GenerationFailed, CornerTouch, ValueError) as exc:
            last = exc
    raise GenerationFailed(f"seed {params.seed}: no valid instance after {retries} attempts ({last})")


# ---------------------------------------------------------------------------
# pinch family


@dataclass(frozen=True)
class PinchParams:
    t: float = 1.0
    W: float = 100.0
    h: float = 3.0
    w: float = 0.25
    delta_test: float = 0.002

    def validate(self):
        if not 0 < self.t <= 1:
            raise InvalidParams(f"gap t must lie in (0, 1], got {self.t}")
        if not (self.h > 0 and self.w > 0 and self.h + self.w < self.W):
            raise InvalidParams("tongues must fit inside the square")
        step = self.t / 4
        for v in (self.W, self.h, self.w, self.W / 2 - self.t / 2, self.W / 2 + self.t / 2, self.h + self.w):
            k = v / step
            if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
                raise InvalidParams(f"coordinate {v} is not on the grid of step t/4={step}")


def pinch_family(p: PinchParams) -> tuple[MarkedQuadrilateral, dict]:
    """Square with two thin tongues leaving a gap of width t at height h."""
    p.validate()
    W, h, w, t = p.W, p.h, p.w, p.t
    lo, hi = W / 2 - t / 2, W / 2 + t / 2
    verts = [
        (0, 0), (W, 0), (W, h), (hi, h), (hi, h + w), (W, h + w),
        (W, W), (0, W), (0, h + w), (lo, h + w), (lo, h), (0, h),
    ]  # fmt: skip
    poly = validate_polygon([(float(x), float(y)) for x, y in verts])
    xy = poly.xy
    corners = [(0, 0), (W, 0), (W, W), (0, W)]
    marks = []
    for c in corners:
        k = int(np.nonzero(np.all(xy == np.array(c, float), axis=1))[0][0])
        marks.append(poly.location_at_param(poly.cumlength[k]))
    Q = mark_quadrilateral(poly, marks)
    r = p.delta_test * W
    R = 10 * r
    meta = {
        "t": t,
        "W": W,
        "h": h,
        "w": w,
        "s_a": W,
        "s_b": t,
        "delta": p.delta_test,
        "r": r,
        "R": R,
        "window": [16 * R, W - 16 * R],
        "pinch_height": h,
    }
    return Q, meta


def pinch_window_check(Q: MarkedQuadrilateral, meta: dict, samples: int = 10) -> list[dict]:
    """For w0 along C_a inside the window, find a radius-r disk in D(w0, 10r) inside Q."""
    from .disk_placement import disk_fits
    from .internal_distance import geodesic_between_sides

    g = geodesic_between_sides(Q, "A")
    C = g.path
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(C, axis=0).T))])
    r, R = meta["r"], meta["R"]
    eps = Q.eta
    lo, hi = 16 * R + 2 * eps, cum[-1] - 16 * R - 2 * eps
    rows = []
    for s in np.linspace(lo, hi, samples):
        k = min(int(np.searchsorted(cum, s, side="right")) - 1, len(C) - 2)
        u = (s - cum[k]) / (cum[k + 1] - cum[k])
        w0 = C[k] + u * (C[k + 1] - C[k])
        cands = [w0] + [w0 + (R - r) * np.array([math.cos(a), math.sin(a)]) for a in np.arange(8) * math.pi / 4]
        hit = next((c for c in cands if disk_fits(Q, c, r)), None)
        rows.append({"s": float(s), "w0": w0.tolist(), "ok": hit is not None, "center": None if hit is None else hit.tolist()})
    return rows
