"""Conformal modulus of rectilinear quadrilaterals and the Rengel bounds.

The modulus is computed as ``1 / E`` where ``E`` is the Dirichlet energy of
the potential that equals 1 on side B1, 0 on side B2 and has zero normal
derivative on both a-sides.  With this convention the W x 1 rectangle,
marked at its corners starting from the origin, has modulus W.

Discretisation: the polygon is tiled by the grid cells of step ``h``; each
cell contributes ``(1/2) * sum (u_i - u_j)^2`` over its four edges, which is
the 5-point Laplacian with natural (Neumann) boundary rows.  The arithmetic
never touches ``h`` itself, so uniformly rescaling a problem together with
its step reproduces the energy bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoordinatesNotOnGrid, NonPositiveDistance, NotRectilinear, SolverDiverged
from .geom_core import MarkedQuadrilateral, SideId, crossing_parity, points_to_polyline_distance

INTERIOR, DIRICHLET0, DIRICHLET1, NEUMANN, UNUSED = 0, 1, 2, 3, -1
NODE_CLASS_NAMES = {INTERIOR: "interior", DIRICHLET0: "dirichlet0", DIRICHLET1: "dirichlet1", NEUMANN: "neumann"}

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GridDiscretization:
    h: float
    origin: tuple[float, float]
    shape: tuple[int, int]  # nodes along x, y
    cells: np.ndarray  # bool (nx-1, ny-1)
    node_class: np.ndarray  # int8 (nx, ny)
    tol: float = DEFAULT_TOL

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero((self.node_class == INTERIOR) | (self.node_class == NEUMANN)))

    def node_xy(self, i, j):
        return self.origin[0] + self.h * np.asarray(i), self.origin[1] + self.h * np.asarray(j)

    def class_counts(self) -> dict:
        return {name: int(np.count_nonzero(self.node_class == c)) for c, name in NODE_CLASS_NAMES.items()}


@dataclass(frozen=True, eq=False)
class PotentialSolution:
    grid: GridDiscretization
    u: np.ndarray  # (nx, ny), NaN at unused nodes
    energy: float
    iterations: int
    residuals: list = field(default_factory=list)
    functional: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class ModulusResult:
    M: float
    energy: float
    levels: list
    error_estimate: float
    iterations: int
    order: float | None = None
    solution: PotentialSolution | None = None

    def to_json(self) -> dict:
        out = {
            "M": self.M,
            "energy": self.energy,
            "levels": [[h, m] for h, m in self.levels],
            "error_estimate": self.error_estimate,
            "iterations": self.iterations,
        }
        if self.order is not None:
            out["order"] = self.order
        return out


@dataclass(frozen=True)
class RengelBounds:
    lower: float
    upper: float

    def contains(self, M: float, err: float = 0.0) -> bool:
        return self.lower - err <= M <= self.upper + err


# ---------------------------------------------------------------------------
# discretisation


def _grid_index(v: float, h: float) -> int:
    k = round(v / h)
    if abs(k * h - v) > 1e-9 * max(1.0, abs(v)):
        raise CoordinatesNotOnGrid(f"coordinate {v!r} is not a multiple of h={h!r}")
    return int(k)


def discretize(Q: MarkedQuadrilateral, h: float, tol: float = DEFAULT_TOL) -> GridDiscretization:
    if not h > 0:
        raise ValueError("h must be positive")
    poly = Q.polygon
    if not poly.is_rectilinear():
        raise NotRectilinear("modulus solver needs an axis-parallel polygon")
    xy = poly.xy
    ix = [_grid_index(x, h) for x in xy[:, 0]]
    iy = [_grid_index(y, h) for y in xy[:, 1]]
    for x, y in Q.mark_points:
        _grid_index(x, h)
        _grid_index(y, h)
    i0, j0 = min(ix), min(iy)
    nx, ny = max(ix) - i0 + 1, max(iy) - j0 + 1
    origin = (i0 * h, j0 * h)

    ci = (np.arange(nx - 1) + 0.5) * h + origin[0]
    cj = (np.arange(ny - 1) + 0.5) * h + origin[1]
    cx, cy = np.meshgrid(ci, cj, indexing="ij")
    cells = crossing_parity(xy, np.column_stack([cx.ravel(), cy.ravel()])).reshape(nx - 1, ny - 1)

    pad = np.zeros((nx + 1, ny + 1), dtype=np.int8)
    pad[1:-1, 1:-1] = cells
    # number of inside cells around each node
    around = pad[:-1, :-1] + pad[1:, :-1] + pad[:-1, 1:] + pad[1:, 1:]
    node_class = np.full((nx, ny), UNUSED, dtype=np.int8)
    node_class[around == 4] = INTERIOR
    bi, bj = np.nonzero((around > 0) & (around < 4))
    bx, by = origin[0] + bi * h, origin[1] + bj * h
    pts = np.column_stack([bx, by])
    band = Q.eta
    on1 = points_to_polyline_distance(pts, Q.side_arc(SideId.B1)) <= band
    on0 = points_to_polyline_distance(pts, Q.side_arc(SideId.B2)) <= band
    cls = np.full(len(pts), NEUMANN, dtype=np.int8)
    cls[on1] = DIRICHLET1
    cls[on0] = DIRICHLET0
    node_class[bi, bj] = cls
    # a reflex corner touching the boundary only through a vertex still counts as boundary;
    # interior nodes on a side (around == 4) cannot occur for a simple polygon
    return GridDiscretization(h, origin, (nx, ny), cells, node_class, tol)


def _edges(grid: GridDiscretization):
    """Node-pair edge list with weights 1/2 per adjacent inside cell."""
    nx, ny = grid.shape
    c = grid.cells.astype(float)
    idx = np.arange(nx * ny).reshape(nx, ny)
    pc = np.zeros((nx + 1, ny + 1))
    pc[1:-1, 1:-1] = c
    # horizontal edge (i,j)-(i+1,j): cells (i,j-1) and (i,j)
    wh = 0.5 * (pc[1:-1, :-1] + pc[1:-1, 1:])  # shape (nx-1, ny)
    # vertical edge (i,j)-(i,j+1): cells (i-1,j) and (i,j)
    wv = 0.5 * (pc[:-1, 1:-1] + pc[1:, 1:-1])  # shape (nx, ny-1)
    a = np.concatenate([idx[:-1, :].ravel(), idx[:, :-1].ravel()])
    b = np.concatenate([idx[1:, :].ravel(), idx[:, 1:].ravel()])
    w = np.concatenate([wh.ravel(), wv.ravel()])
    keep = w > 0
    return a[keep], b[keep], w[keep]


def _apply(a, b, w, x, n):
    d = w * (x[a] - x[b])
    return np.bincount(a, d, minlength=n) - np.bincount(b, d, minlength=n)


def solve_potential(grid: GridDiscretization, max_iter: int | None = None) -> PotentialSolution:
    """Jacobi-preconditioned CG for the mixed Dirichlet/Neumann problem (matrix-free)."""
    nx, ny = grid.shape
    n = nx * ny
    cls = grid.node_class.ravel()
    a, b, w = _edges(grid)
    free = (cls == INTERIOR) | (cls == NEUMANN)
    nf = int(free.sum())
    u = np.zeros(n)
    u[cls == DIRICHLET1] = 1.0
    if not (cls == DIRICHLET1).any() or not (cls == DIRICHLET0).any():
        raise SolverDiverged("no Dirichlet nodes on one of the b-sides (grid too coarse?)")
    diag = np.bincount(a, w, minlength=n) + np.bincount(b, w, minlength=n)
    # right-hand side: -K_fd u_d
    rhs = -_apply(a, b, w, u, n)
    rhs[~free] = 0.0
    minv = np.zeros(n)
    minv[free] = 1.0 / diag[free]

    def K(x):
        y = _apply(a, b, w, x, n)
        y[~free] = 0.0
        return y

    x = np.zeros(n)
    r = rhs.copy()
    bnorm = float(np.linalg.norm(rhs))
    cap = max_iter if max_iter is not None else 50 * max(nf, 1)
    residuals = [float(np.linalg.norm(r))]
    functional = [0.0]
    it = 0
    if bnorm > 0:
        z = minv * r
        p = z.copy()
        rz = float(r @ z)
        while residuals[-1] > grid.tol * bnorm:
            if it >= cap:
                raise SolverDiverged(f"CG stalled at relative residual {residuals[-1] / bnorm:.3e} after {it} iterations")
            Kp = K(p)
            pKp = float(p @ Kp)
            if not pKp > 0:
                raise SolverDiverged("CG breakdown: matrix not positive definite on the search direction")
            alpha = rz / pKp
            x += alpha * p
            r -= alpha * Kp
            it += 1
            residuals.append(float(np.linalg.norm(r)))
            # 0.5 x'Kx - b'x = -0.5 x'(b + r)
            functional.append(-0.5 * float(x @ (rhs + r)))
            z = minv * r
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new
    u[free] = x[free]
    d = u[a] - u[b]
    energy = float(np.sum(w * d * d))
    ugrid = u.reshape(nx, ny).copy()
    ugrid[grid.node_class == UNUSED] = np.nan
    return PotentialSolution(grid, ugrid, energy, it, residuals, functional)


def compute_modulus(Q: MarkedQuadrilateral, h: float, tol: float = DEFAULT_TOL, keep_solution: bool = False) -> ModulusResult:
    sol = solve_potential(discretize(Q, h, tol))
    if not sol.energy > 0:
        raise SolverDiverged("zero Dirichlet energy")
    M = 1.0 / sol.energy
    return ModulusResult(M, sol.energy, [(h, M)], 0.0, sol.iterations, None, sol if keep_solution else None)


def richardson(levels: list) -> tuple[float, float, float | None]:
    """(extrapolated value, error estimate, fitted order) from halving levels."""
    ms = [m for _, m in levels]
    if len(ms) < 2:
        return ms[-1], 0.0, None
    if len(ms) >= 3:
        d1, d2 = ms[-2] - ms[-3], ms[-1] - ms[-2]
        if d1 != 0 and d2 != 0 and d1 * d2 > 0:
            p = math.log2(abs(d1 / d2))
        else:
            p = 2.0
        p = min(max(p, 0.5), 4.0)
    else:
        p = 2.0
    d2 = ms[-1] - ms[-2]
    extrap = ms[-1] + d2 / (2.0**p - 1.0)
    return extrap, abs(ms[-1] - extrap), p


def modulus_extrapolated(Q: MarkedQuadrilateral, levels, tol: float = DEFAULT_TOL) -> ModulusResult:
    """Solve at each step of ``levels`` (each halving the last) and extrapolate."""
    levels = [float(h) for h in levels]
    if len(levels) < 2:
        raise ValueError("need at least two levels")
    for h0, h1 in zip(levels, levels[1:]):
        if not math.isclose(h1, h0 / 2, rel_tol=1e-12):
            raise ValueError("each level must halve the previous step")
    out, iters = [], 0
    for h in levels:
        r = compute_modulus(Q, h, tol)
        out.append((h, r.M))
        iters += r.iterations
    M, err, p = richardson(out)
    last = out[-1][1]
    return ModulusResult(M, 1.0 / M, out, max(err, abs(last - M)), iters, p)


# ---------------------------------------------------------------------------
# Rengel bounds


def _lower(x: float) -> float:
    y = math.log1p(2.0 * x)
    return y * y / (math.pi + 2.0 * math.pi * y)


def rengel_bounds(s_a: float, s_b: float) -> RengelBounds:
    if not (s_a > 0 and s_b > 0):
        raise NonPositiveDistance(f"internal distances must be positive, got s_a={s_a}, s_b={s_b}")
    return RengelBounds(_lower(s_b / s_a), 1.0 / _lower(s_a / s_b))


def ratio_bound_from_K(K: float) -> float:
    """Largest x = s_b/s_a with lower(x) <= K; the bound is symmetric in the ratio."""
    if not K >= 1:
        raise ValueError(f"K must be >= 1, got {K}")
    # lower is increasing in y = log(1+2x); bisect on y
    f = lambda y: y * y / (math.pi + 2.0 * math.pi * y) - K  # noqa: E731
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return math.expm1(hi) / 2.0


def conjugate(Q: MarkedQuadrilateral) -> MarkedQuadrilateral:
    """Marks rotated by one place; a-sides and b-sides swap."""
    m = Q.marks
    return MarkedQuadrilateral(Q.polygon, (m[1], m[2], m[3], m[0]))
