from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinwheel.exact import ExactPoint, point_in_triangle
from pinwheel.exceptions import CapacityError
from pinwheel.substitution import (
    CHILD_CHIRALITY,
    PlacedTriangle,
    control_point,
    generate_patch,
    inflate,
    iter_subdivisions,
    seed,
    subdivide,
    verify_partition,
)


def P(x, y):
    return ExactPoint(Fraction(x), Fraction(y))


def test_seed_geometry():
    t = seed()
    assert t.vertices == (P("-1/2", "-1/2"), P("1/2", "-1/2"), P("-1/2", "3/2"))
    assert t.chirality == -1 and t.check_sides()
    assert control_point(t) == P(0, 0)


def test_inflation_is_multiplication_by_two_plus_i():
    t = inflate(seed())
    for before, after in zip(seed().vertices, t.vertices):
        z = complex(float(before.x), float(before.y)) * (2 + 1j)
        assert (float(after.x), float(after.y)) == (z.real, z.imag)
    assert t.scale_exp == 1 and t.check_sides()


def _oracle_children(R, S, L):
    # plain-Fraction barycentric rule: F, M, G, H in (r, s, l) weights
    def at(w):
        return tuple(w[0] * a + w[1] * b + w[2] * c for a, b, c in zip(R, S, L))
    f = Fraction
    F = at((0, f(4, 5), f(1, 5)))
    M = at((f(1, 2), 0, f(1, 2)))
    G = at((0, f(2, 5), f(3, 5)))
    H = at((f(1, 2), f(2, 5), f(1, 10)))
    return [(F, S, R), (H, R, M), (H, F, M), (G, M, F), (G, M, L)]


def test_first_two_levels_match_oracle():
    z = [complex(*map(float, (v.x, v.y))) * (2 + 1j) ** 2 for v in seed().vertices]
    top = [(Fraction(w.real), Fraction(w.imag)) for w in z]
    level = [(tuple(top), -1)]
    for _ in range(2):
        level = [(kid, c * x) for tri, c in level
                 for kid, x in zip(_oracle_children(*tri), CHILD_CHIRALITY)]
    got = generate_patch(2).tiles
    assert [((t.r.x.as_fraction(), t.r.y.as_fraction()), (t.s.x.as_fraction(), t.s.y.as_fraction()),
             (t.l.x.as_fraction(), t.l.y.as_fraction())) for t in got] == [v for v, _ in level]
    assert [t.chirality for t in got] == [c for _, c in level]


@pytest.mark.parametrize("depth", range(6))
def test_patch_counts_and_sides(depth):
    p = generate_patch(depth)
    assert len(p) == 5**depth == p.area
    assert all(t.check_sides() and t.scale_exp == 0 for t in p.tiles)
    assert sum(abs(t.double_area()) for t in p.tiles) == 2 * p.area
    region = p.region
    assert all(point_in_triangle(v, region) != "outside" for t in p.tiles for v in t.vertices)


def test_every_subdivision_is_a_partition():
    assert all(verify_partition(p, k) for p, k in iter_subdivisions(5))


def test_corrupted_subdivision_detected():
    parent = inflate(seed())
    kids = list(subdivide(parent))
    rep = verify_partition(parent, kids[:4] + [kids[3]])
    assert not rep and any("overlap" in f for f in rep.failures)
    flipped = PlacedTriangle(kids[0].r, kids[0].s, kids[0].l, -kids[0].chirality, 0)
    assert not verify_partition(parent, [flipped] + kids[1:])
    assert not verify_partition(parent, kids[:4])


def test_control_points_are_interior():
    for t in generate_patch(4).tiles:
        assert point_in_triangle(control_point(t), t.vertices) == "inside"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3124))
def test_tiles_have_exact_unit_geometry(i):
    t = generate_patch(5).tiles[i]
    c = control_point(t)
    assert c.x.two_exp == 0 and c.y.two_exp == 0
    assert (t.s - t.r).dot(t.l - t.r) == 0


def test_depth_cap_and_validation():
    with pytest.raises(CapacityError):
        generate_patch(9)
    with pytest.raises(CapacityError):
        generate_patch(3, max_depth=2)
    with pytest.raises(ValueError):
        generate_patch(-1)
    with pytest.raises(ValueError):
        subdivide(seed())
    with pytest.raises(ValueError):
        control_point(inflate(seed()))


def test_parallel_generation_same_order():
    assert generate_patch(4, workers=3).tiles == generate_patch(4).tiles


def test_workers_from_environment(monkeypatch):
    from pinwheel.substitution import default_workers
    monkeypatch.setenv("PINWHEEL_WORKERS", "6")
    assert default_workers() == 6
    monkeypatch.setenv("PINWHEEL_WORKERS", "x")
    assert default_workers() == 1
