import pytest

from quadlab.geom_core import quad_from_points

RECT = [(0, 0), (2, 0), (2, 1), (0, 1)]
SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
U_POLY = [(0, 0), (3, 0), (3, 2), (2, 2), (2, 0.5), (1, 0.5), (1, 2), (0, 2)]
U_MARKS = [(1, 2), (2, 2), (2, 1.5), (1, 1.5)]
L_POLY = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
L_MARKS = [(0, 0), (2, 0), (1, 2), (0, 2)]
DIAMOND = [(1, 0), (2, 1), (1, 2), (0, 1)]


@pytest.fixture(scope="session")
def rect():
    return quad_from_points(RECT, RECT)


@pytest.fixture(scope="session")
def square():
    return quad_from_points(SQUARE, SQUARE)


@pytest.fixture(scope="session")
def upoly():
    return quad_from_points(U_POLY, U_MARKS)


@pytest.fixture(scope="session")
def lpoly():
    return quad_from_points(L_POLY, L_MARKS)


@pytest.fixture(scope="session")
def diamond():
    return quad_from_points(DIAMOND, DIAMOND)
