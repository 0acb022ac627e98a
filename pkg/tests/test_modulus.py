import math

import numpy as np
import pytest

from quadlab.errors import CoordinatesNotOnGrid, NonPositiveDistance, NotRectilinear
from quadlab.geom_core import quad_from_points
from quadlab.modulus import (
    compute_modulus,
    conjugate,
    discretize,
    modulus_extrapolated,
    ratio_bound_from_K,
    rengel_bounds,
    solve_potential,
)
from quadlab.internal_distance import side_distances

from conftest import L_POLY, L_MARKS


def test_square(square):
    assert compute_modulus(square, 1 / 32).M == pytest.approx(1.0, rel=0.005)


def test_rectangle(rect):
    r = compute_modulus(rect, 1 / 32)
    assert r.M == pytest.approx(2.0, rel=0.01)
    assert r.M == pytest.approx(1 / r.energy)


def test_rectangle_extrapolated(rect):
    r = modulus_extrapolated(rect, [1 / 16, 1 / 32])
    assert r.M == pytest.approx(2.0, abs=1e-6)
    assert r.error_estimate < 1e-3


def test_rectangle_reciprocity(rect):
    m = compute_modulus(rect, 1 / 16).M
    mc = compute_modulus(conjugate(rect), 1 / 16).M
    assert m * mc == pytest.approx(1.0, rel=0.02)


def test_l_polygon_pinned(lpoly):
    r = modulus_extrapolated(lpoly, [1 / 32, 1 / 64, 1 / 128])
    Ms = [m for _, m in r.levels]
    d = np.diff(Ms)
    assert np.all(d > 0) or np.all(d < 0)
    assert 0.5 < r.order < 2.2
    # symmetric about the diagonal after relabelling: value 1/sqrt(3) to grid accuracy
    assert r.M == pytest.approx(1 / math.sqrt(3), rel=2e-3)
    rc = modulus_extrapolated(conjugate(lpoly), [1 / 32, 1 / 64, 1 / 128])
    assert r.M * rc.M == pytest.approx(1.0, rel=0.02)


def test_errors(diamond, lpoly):
    with pytest.raises(NotRectilinear):
        compute_modulus(diamond, 0.25)
    with pytest.raises(CoordinatesNotOnGrid):
        compute_modulus(lpoly, 0.3)


def test_node_classes_and_max_principle(lpoly):
    grid = discretize(lpoly, 1 / 16)
    counts = grid.class_counts()
    assert counts["dirichlet0"] > 0 and counts["dirichlet1"] > 0 and counts["neumann"] > 0
    sol = solve_potential(grid)
    u = sol.u[np.isfinite(sol.u)]
    assert u.min() >= -1e-12 and u.max() <= 1 + 1e-12
    assert sol.energy > 0
    f = np.asarray(sol.functional)
    # CG minimises the energy functional; allow roundoff-level wiggles
    assert np.all(np.diff(f) <= 1e-12 * np.abs(f[1:]).max())


def test_scale_invariance_bitwise():
    lam = 4.0
    Q = quad_from_points(L_POLY, L_MARKS)
    S = quad_from_points([(lam * x, lam * y) for x, y in L_POLY], [(lam * x, lam * y) for x, y in L_MARKS])
    a = compute_modulus(Q, 1 / 16)
    b = compute_modulus(S, lam / 16)
    assert a.energy == b.energy


def test_rengel_examples():
    b = rengel_bounds(1, 1)
    assert b.lower == pytest.approx(math.log(3) ** 2 / (math.pi * (1 + 2 * math.log(3))))
    assert b.lower == pytest.approx(0.12016, abs=1e-5)
    assert b.upper == pytest.approx(8.3222, abs=1e-4)
    assert b.upper * b.lower == pytest.approx(1.0, rel=1e-14)
    b = rengel_bounds(1, 2)
    assert b.lower == pytest.approx(0.19543, abs=1e-5)
    # direct evaluation gives 15.6035; the rounded figure 15.601 is off in the fourth digit
    assert b.upper == pytest.approx(15.601, rel=1e-3)
    assert b.contains(2.0)


def test_rengel_errors():
    with pytest.raises(NonPositiveDistance):
        rengel_bounds(0, 1)


def test_ratio_bound():
    Lt = ratio_bound_from_K(1)
    y = math.pi + math.sqrt(math.pi**2 + math.pi)
    assert Lt == pytest.approx((math.exp(y) - 1) / 2, rel=1e-9)
    assert Lt == pytest.approx(425.9, abs=0.1)
    assert rengel_bounds(1, Lt).lower == pytest.approx(1.0, abs=1e-9)
    assert ratio_bound_from_K(2) > Lt
    with pytest.raises(ValueError):
        ratio_bound_from_K(0.9)


def test_conjugate_cycle(rect, upoly):
    assert side_distances(conjugate(rect)) == (2.0, 1.0)
    assert conjugate(conjugate(conjugate(conjugate(upoly)))) == upoly
