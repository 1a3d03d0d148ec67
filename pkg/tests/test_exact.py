import pickle
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pinwheel.exact import (
    ZERO_KEY,
    DistanceKey,
    ExactPoint,
    ExactScalar,
    gaussian_valuations,
    orientation,
    point_in_triangle,
    rotate_theta,
    rotation_membership,
    squared_distance,
)

scalars = st.builds(ExactScalar, st.integers(-10**6, 10**6), st.integers(0, 6), st.integers(0, 6))
points = st.builds(ExactPoint, scalars, scalars)
lattice = st.builds(ExactPoint, st.integers(-50, 50), st.integers(-50, 50))


def frac(v):
    return v.as_fraction()


@given(scalars, scalars)
def test_ring_ops_match_fractions(a, b):
    assert frac(a + b) == frac(a) + frac(b)
    assert frac(a - b) == frac(a) - frac(b)
    assert frac(a * b) == frac(a) * frac(b)
    assert (a < b) == (frac(a) < frac(b))
    assert (a == b) == (frac(a) == frac(b))


@given(scalars)
def test_normal_form_is_canonical(a):
    b = ExactScalar.from_fraction(frac(a))
    assert (a.num, a.two_exp, a.five_exp) == (b.num, b.two_exp, b.five_exp)
    assert hash(a) == hash(b)
    assert ExactScalar.from_token(a.token()) == a
    assert pickle.loads(pickle.dumps(a)) == a


@given(scalars, st.integers(0, 5), st.integers(0, 5))
def test_division_by_powers(a, i, j):
    assert frac(a / (2**i * 5**j)) == frac(a) / (2**i * 5**j)
    assert a.div_pow(i, j) == a / (2**i * 5**j)


def test_division_leaving_ring_rejected():
    with pytest.raises(ValueError):
        ExactScalar(1) / 3
    with pytest.raises(ZeroDivisionError):
        ExactScalar(1) / 0
    with pytest.raises(ValueError):
        ExactScalar.from_fraction(Fraction(1, 6))


def test_integer_hash_matches_int():
    assert hash(ExactScalar(10, 1, 0)) == hash(5)
    assert ExactScalar(10, 1, 0) == 5


@given(points, points)
def test_squared_distance_key(p, q):
    key = squared_distance(p, q)
    want = (frac(p.x) - frac(q.x)) ** 2 + (frac(p.y) - frac(q.y)) ** 2
    assert key.value == want
    assert DistanceKey.from_value(want) == key
    if key != ZERO_KEY:
        if key.residual_two_exp:
            assert key.s % 4
        if key.ell:
            assert key.s % 5


@given(st.lists(st.fractions(min_value=0, max_value=100).map(
    lambda f: Fraction(round(f * 400), 400)), min_size=2, max_size=8))
def test_key_order_matches_values(vals):
    keys = [DistanceKey.from_value(v) for v in vals]
    assert [k.value for k in sorted(keys)] == sorted(vals)


@given(lattice, st.integers(-4, 4))
def test_rotation_membership_interval(p, n):
    if p.x == 0 and p.y == 0:
        return
    q = rotate_theta(p, n)
    lo, hi = rotation_membership(q)
    assert lo <= n <= hi
    assert rotate_theta(rotate_theta(p, n), -n) == p


def test_rotation_membership_known_point():
    # 5 = (2+i)(2-i): the point (5, 0) lies in R_{n theta} Z^2 for n in [-1, 1]
    assert rotation_membership(ExactPoint(5, 0)) == (-1, 1)
    assert gaussian_valuations(ExactPoint(5, 0)) == (1, 1)
    assert rotation_membership(ExactPoint(1, 0)) == (0, 0)
    assert rotation_membership(ExactPoint(Fraction(1, 2), 0)) is None
    with pytest.raises(ValueError):
        gaussian_valuations(ExactPoint(0, 0))


def test_orientation_and_containment():
    a, b, c = ExactPoint(0, 0), ExactPoint(1, 0), ExactPoint(0, 1)
    assert orientation(a, b, c) == 1 and orientation(a, c, b) == -1
    assert point_in_triangle(ExactPoint(Fraction(1, 4), Fraction(1, 4)), (a, b, c)) == "inside"
    assert point_in_triangle(ExactPoint(Fraction(1, 2), Fraction(1, 2)), (a, b, c)) == "boundary"
    assert point_in_triangle(ExactPoint(1, 1), (a, b, c)) == "outside"
    with pytest.raises(ValueError):
        point_in_triangle(a, (a, b, ExactPoint(2, 0)))


@given(points, points, points)
def test_orientation_antisymmetric(a, b, c):
    assert orientation(a, b, c) == -orientation(b, a, c) == orientation(b, c, a)
