import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlab.errors import GridTooCoarse, InvalidDelta
from quadlab.generators import GeneratorParams, generate_random_rectilinear
from quadlab.geom_core import SideId, quad_from_points, side_set_distance
from quadlab.internal_distance import (
    OCTILE_DISTORTION,
    ExclusionSpec,
    geodesic_between_sides,
    geodesic_oracle,
    max_valid_delta,
    path_inside,
    side_distances,
    truncated_internal_distance,
    validate_exclusion_delta,
)
from quadlab.modulus import conjugate

from conftest import U_MARKS, U_POLY


def test_rectangle_distances(rect):
    a = geodesic_between_sides(rect, "A")
    b = geodesic_between_sides(rect, "B")
    assert a.length == 1.0 and b.length == 2.0
    assert a.endpoint_sides == (SideId.A1, SideId.A2)
    assert a.to_json()["length"] == 1.0


def test_rectangle_tie_break_is_centred(rect):
    # equal-length verticals: the centred segment is chosen
    a = geodesic_between_sides(rect, "A")
    assert a.path.tolist() == [[1.0, 0.0], [1.0, 1.0]]


def test_u_polygon_pair_b(upoly):
    g = geodesic_between_sides(upoly, "B")
    assert g.length == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(g.path, [(2, 1.5), (2, 0.5), (1, 0.5), (1, 1.5)])


def test_l_polygon(lpoly):
    assert side_distances(lpoly) == pytest.approx((2.0, 1.0))


def test_truncated_rectangle(rect):
    spec = ExclusionSpec(0.05)
    assert truncated_internal_distance(rect, "A", spec).length == pytest.approx(1.0)
    assert truncated_internal_distance(rect, "B", spec).length == pytest.approx(2.0)


def test_validate_delta_cases(rect):
    assert validate_exclusion_delta(rect, 0.05)[0]
    ok, why = validate_exclusion_delta(rect, 0.11)
    assert not ok and why
    assert not validate_exclusion_delta(rect, 0.1)[0]  # strict
    with pytest.raises(InvalidDelta):
        truncated_internal_distance(rect, "A", ExclusionSpec(0.2))


def _staircase(n=16):
    v = [(0, 0)]
    x = y = 0
    for _ in range(n):
        x += 1
        v.append((x, y))
        y += 1
        v.append((x, y))
    v.append((0, y))
    return v


def test_staircase_truncated_bound():
    v = _staircase(8)
    Q = quad_from_points(v, [v[0], v[8], v[16], v[-1]])
    delta = 0.9 * max_valid_delta(Q)
    for pair in "AB":
        s = geodesic_between_sides(Q, pair).length
        sd = truncated_internal_distance(Q, pair, ExclusionSpec(delta)).length
        assert s - 1e-12 <= sd <= s + 4 * math.pi * delta


def test_oracle_examples(rect, upoly, lpoly):
    assert geodesic_oracle(rect, "A", 1 / 64) == pytest.approx(1.0, rel=0.02)
    assert geodesic_oracle(upoly, "B", 1 / 128) == pytest.approx(3.0, rel=0.02)
    assert geodesic_oracle(lpoly, "A", 1 / 64) == pytest.approx(2.0, rel=0.02)


def test_oracle_too_coarse():
    # the short side B1 sits in the corner farther than h from every grid node
    w = 11.9
    Q = quad_from_points([(0, 0), (w, 0), (w, w), (0, w)], [(0, 0), (w, 11.8), (w, w), (0, w)])
    with pytest.raises(GridTooCoarse):
        geodesic_oracle(Q, "B", 4.0)


@pytest.mark.parametrize("seed", range(6))
def test_oracle_sandwich(seed):
    Q = generate_random_rectilinear(GeneratorParams(seed))
    h = 0.25
    for pair in "AB":
        s = geodesic_between_sides(Q, pair).length
        o = geodesic_oracle(Q, pair, h)
        assert s - 1e-9 <= o <= OCTILE_DISTORTION * s + 4 * h


@pytest.mark.parametrize("seed", range(10))
def test_corpus_properties(seed):
    Q = generate_random_rectilinear(GeneratorParams(seed, n=16, cells=80))
    Qc = conjugate(Q)
    for pair, (s1, s2) in (("A", (SideId.A1, SideId.A2)), ("B", (SideId.B1, SideId.B2))):
        g = geodesic_between_sides(Q, pair)
        assert g.length >= side_set_distance(Q.side_arc(s1), Q.side_arc(s2)) - 1e-12
        assert g.length == pytest.approx(float(np.sum(np.hypot(*np.diff(g.path, axis=0).T))), rel=1e-12)
        assert path_inside(Q, g.path)
    assert geodesic_between_sides(Qc, "A").length == geodesic_between_sides(Q, "B").length


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([0.5, 2.0, 3.0, 10.0, 0.125]))
def test_scaling(lam):
    Q = quad_from_points(U_POLY, U_MARKS)
    S = quad_from_points([(lam * x, lam * y) for x, y in U_POLY], [(lam * x, lam * y) for x, y in U_MARKS])
    for pair in "AB":
        a = geodesic_between_sides(Q, pair).length
        b = geodesic_between_sides(S, pair).length
        assert b == pytest.approx(lam * a, rel=1e-12)
