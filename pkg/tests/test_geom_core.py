import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlab.errors import InputError, MarksNotDistinct, MarksOutOfOrder, SelfIntersection
from quadlab.geom_core import (
    SideId,
    arc_diameter,
    classify_points,
    contains_point,
    crossing_parity,
    distance_to_boundary,
    mark_quadrilateral,
    orient,
    orient_many,
    polyline_length,
    quad_from_json,
    quad_from_points,
    side_set_distance,
    validate_polygon,
)

from conftest import L_POLY, RECT, U_MARKS, U_POLY


def test_rectangle_valid_ccw():
    p = validate_polygon(RECT)
    assert p.area == pytest.approx(2.0)
    assert p.n == 4


def test_bowtie_rejected():
    with pytest.raises(SelfIntersection) as exc:
        validate_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert exc.value.edges is not None


def test_clockwise_is_reversed():
    p = validate_polygon([(0, 1), (2, 1), (2, 0), (0, 0)])
    assert p.area == pytest.approx(2.0)


def test_duplicate_vertices_collapse():
    p = validate_polygon([(0, 0), (1, 0), (1, 0), (1, 1), (0, 1)])
    assert p.n == 4


def test_square_corner_marks_one_edge_per_side(square):
    for s in SideId:
        assert len(square.side_arc(s)) == 2


def test_marks_out_of_order():
    p = validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    with pytest.raises(MarksOutOfOrder):
        mark_quadrilateral(p, [(0, 0), (2, 0), (1, 0), (3, 0)])


def test_marks_not_distinct():
    p = validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    with pytest.raises(MarksNotDistinct):
        mark_quadrilateral(p, [(0, 0), (0, 0), (1, 0), (3, 0)])


def test_l_polygon_b1_is_staircase(lpoly):
    b1 = lpoly.side_arc(SideId.B1)
    assert b1.tolist() == [[2, 0], [2, 1], [1, 1], [1, 2]]


def test_sides_partition_perimeter(lpoly, upoly):
    for Q in (lpoly, upoly):
        total = sum(polyline_length(Q.side_arc(s)) for s in SideId)
        assert total == pytest.approx(Q.polygon.perimeter, rel=1e-14)


def test_contains_and_distance(square, lpoly):
    assert contains_point(square, (0.5, 0.5)) == "inside"
    assert distance_to_boundary(square, (0.5, 0.5)) == 0.5
    assert contains_point(square, (0.5, 0.0)) == "boundary"
    assert distance_to_boundary(square, (0.5, 0.0)) == 0.0
    assert contains_point(lpoly, (1.5, 1.5)) == "outside"


def test_diameter_and_set_distance(square, rect):
    assert arc_diameter(square.side_arc(SideId.A1)) == 1.0
    assert side_set_distance(rect.side_arc(SideId.A1), rect.side_arc(SideId.A2)) == 1.0


def test_u_stub_distance_is_euclidean(upoly):
    assert side_set_distance(upoly.side_arc(SideId.B1), upoly.side_arc(SideId.B2)) == pytest.approx(1.0)


def test_json_roundtrip(upoly):
    text = json.dumps(upoly.to_json())
    assert quad_from_json(text) == upoly


def test_json_rejects_missing_fields():
    with pytest.raises(InputError):
        quad_from_json({"vertices": [[0, 0], [1, 0], [1, 1]]})
    with pytest.raises(InputError):
        quad_from_json({"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "marks": [{"edge": 0}] * 4})


def test_json_clockwise_marks_remapped():
    data = {
        "vertices": [[0, 0], [0, 1], [2, 1], [2, 0]],
        "marks": [{"edge": 0, "t": 0.5}, {"edge": 1, "t": 0.5}, {"edge": 2, "t": 0.5}, {"edge": 3, "t": 0.5}],
    }
    # clockwise list: the marks traverse the boundary clockwise, so reversing breaks the order
    with pytest.raises(MarksOutOfOrder):
        quad_from_json(data)
    data["marks"] = data["marks"][::-1]
    Q = quad_from_json(data)
    assert Q.polygon.area > 0


def _exact_sign(a, b, c):
    F = Fraction
    d = (F(b[0]) - F(a[0])) * (F(c[1]) - F(a[1])) - (F(b[1]) - F(a[1])) * (F(c[0]) - F(a[0]))
    return (d > 0) - (d < 0)


coord = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(st.tuples(coord, coord), st.tuples(coord, coord), st.floats(0, 1))
def test_orient_exact_on_near_collinear(a, b, u):
    # a point on the segment's float rounding: the hard case for naive evaluation
    c = (a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]))
    assert orient(a, b, c) == _exact_sign(a, b, c)
    got = orient_many(*(np.array([v]) for v in (a[0], a[1], b[0], b[1], c[0], c[1])))
    assert int(got[0]) == _exact_sign(a, b, c)


@settings(max_examples=200, deadline=None)
@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_orient_exact_random(a, b, c):
    assert orient(a, b, c) == _exact_sign(a, b, c)


def test_parity_agrees_with_classify(lpoly):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 2.5, size=(2000, 2))
    cls = classify_points(lpoly.polygon.xy, pts)
    par = crossing_parity(lpoly.polygon.xy, pts)
    strict = cls != 0
    assert np.array_equal(par[strict], cls[strict] == 1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1000.0))
def test_scaling(lam):
    Q = quad_from_points(U_POLY, U_MARKS)
    S = quad_from_points([(lam * x, lam * y) for x, y in U_POLY], [(lam * x, lam * y) for x, y in U_MARKS])
    for s in SideId:
        assert arc_diameter(S.side_arc(s)) == pytest.approx(lam * arc_diameter(Q.side_arc(s)), rel=1e-12)
    d = side_set_distance(S.side_arc(SideId.B1), S.side_arc(SideId.B2))
    assert d == pytest.approx(lam * 1.0, rel=1e-12)
    assert distance_to_boundary(S, (lam * 0.5, lam * 0.25)) == pytest.approx(lam * 0.25, rel=1e-12)


def test_contains_consistent_with_distance():
    Q = quad_from_points(L_POLY, [(0, 0), (2, 0), (1, 2), (0, 2)])
    rng = np.random.default_rng(3)
    for p in rng.uniform(-0.2, 2.2, size=(300, 2)):
        c = contains_point(Q, p)
        d = distance_to_boundary(Q, p)
        assert (c == "boundary") == (d == 0.0)
