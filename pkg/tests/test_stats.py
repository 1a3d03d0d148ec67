import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from pinwheel.exact import ExactPoint
from pinwheel.exceptions import PatchCorruptionError
from pinwheel.stats import (
    ShellFrequencyEstimator,
    brute_force_histogram,
    control_points,
    eta_estimate,
    eta_exact_reference,
    histogram_from_patch,
    integer_embedding,
    motif_frequency,
    pair_histogram,
    proposition_checks,
    window_area,
    window_mask,
)
from pinwheel.substitution import Patch, generate_patch


def _edge_distance_sq(p, a, b):
    px, py, ax, ay, bx, by = (Fraction(v) for v in (*p, *a, *b))
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    return cross, cross * cross / ((bx - ax) ** 2 + (by - ay) ** 2)


def _oracle_mask(points, region, margin):
    reg = [(v.x.as_fraction(), v.y.as_fraction()) for v in region]
    o = 1 if _edge_distance_sq(reg[2], reg[0], reg[1])[0] > 0 else -1
    out = []
    for p in points:
        q = (p.x.as_fraction(), p.y.as_fraction())
        ok = True
        for i in range(3):
            c, d2 = _edge_distance_sq(q, reg[i], reg[(i + 1) % 3])
            ok &= c * o >= 0 and d2 >= Fraction(margin) ** 2
        out.append(ok)
    return out


@pytest.mark.parametrize("depth,r_max_sq", [(2, 5), (3, 5), (4, 5), (4, 40)])
def test_cell_list_matches_brute_force(depth, r_max_sq):
    pts = control_points(generate_patch(depth))
    h = pair_histogram(pts, r_max_sq)
    assert h.entries == brute_force_histogram(pts, r_max_sq)


@pytest.mark.parametrize("margin", [1, Fraction(3, 2), 3])
def test_eroded_window_matches_oracle(margin):
    p = generate_patch(4)
    pts = control_points(p)
    emb, reg = integer_embedding(pts, p.region)
    mask = window_mask(emb, reg, Fraction(margin))
    assert mask.tolist() == _oracle_mask(pts, p.region, margin)
    h = histogram_from_patch(p, 5, margin=margin)
    assert h.entries == brute_force_histogram(pts, 5, mask)
    assert h.point_count == int(mask.sum())


def test_window_area_against_polygon_offset():
    region = generate_patch(5).region
    V = np.array([v.to_float() for v in region])
    (ux, uy), (vx, vy) = V[1] - V[0], V[2] - V[0]
    if ux * vy - uy * vx < 0:
        V = V[::-1]
    m = 3.0
    lines = []
    for i in range(3):
        a, b = V[i], V[(i + 1) % 3]
        n = np.array([-(b - a)[1], (b - a)[0]]) / np.linalg.norm(b - a)
        lines.append((n, n @ a + m))
    inner = [np.linalg.solve(np.array([lines[i][0], lines[(i + 1) % 3][0]]),
                             np.array([lines[i][1], lines[(i + 1) % 3][1]])) for i in range(3)]
    x, y = np.array(inner).T
    shoelace = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    assert window_area(region, Fraction(3)) == pytest.approx(shoelace, rel=1e-12)
    assert window_area(region) == 5**5
    with pytest.raises(ValueError):
        window_area(generate_patch(1).region, Fraction(3))


def test_workers_give_identical_histograms():
    p = generate_patch(5)
    a = histogram_from_patch(p, 100, window="full", margin=0, workers=1)
    b = histogram_from_patch(p, 100, window="full", margin=0, workers=4)
    assert a.entries == b.entries and list(a.entries) == list(b.entries)


def test_histogram_invariants():
    h = histogram_from_patch(generate_patch(5), 5, window="full", margin=0)
    assert list(h.entries) == sorted(h.entries)
    # ordered pairs in the full window are symmetric, so every count is even
    assert all(c % 2 == 0 for c in h.entries.values())
    assert h.total_pairs == sum(h.entries.values())
    assert np.all(np.diff(h.radii()) > 0)


def test_reference_table_rows():
    rows = eta_exact_reference()
    assert len(rows) == 13
    assert rows[0].r_sq == 0 and rows[0].eta == 1
    assert [r.r_sq for r in rows] == sorted(r.r_sq for r in rows)
    assert {str(r.r_sq) for r in rows if r.starred} == {"2", "17/5", "4", "113/25", "5"}


def test_depth6_estimates_close_to_reference(hist):
    est = {e.r_sq: e for e in eta_estimate(hist(6, 5, "eroded", 3))}
    for row in eta_exact_reference()[1:]:
        e = est[row.r_sq]
        assert e.eta_exact == row.eta
        assert abs(e.relative_deviation) < 0.15
    # density of control points is one per unit area
    assert est[Fraction(0)].eta_hat == pytest.approx(1.0, rel=0.01)


def test_only_reference_distances_occur():
    h = histogram_from_patch(generate_patch(6), 5, window="full", margin=0)
    assert {k.value for k in h.entries} == {r.r_sq for r in eta_exact_reference()[1:]}


def test_motif_frequency_is_half_eta():
    p = generate_patch(5)
    pts = control_points(p)
    motif = [ExactPoint(0, 0), ExactPoint(1, 0)]
    h = pair_histogram(pts, 5)
    assert motif_frequency(pts, motif, histogram=h) == h.count(Fraction(1)) / 2 / h.window_area
    assert motif_frequency(pts, motif) == motif_frequency(pts, motif, histogram=h)
    with pytest.raises(ValueError):
        motif_frequency(pts, motif[:1])
    with pytest.raises(ValueError):
        motif_frequency(pts, [motif[0], motif[0]])


def test_proposition_checks_flag_bad_points():
    bad = [ExactPoint(Fraction(1, 2), 0), ExactPoint(Fraction(3, 2), 0)]
    rep = proposition_checks(bad, 5)
    assert not rep.ok
    assert len(rep.coordinate_failures) == 2 and len(rep.rotation_failures) == 2


def test_duplicate_control_points_rejected():
    p = generate_patch(1)
    with pytest.raises(PatchCorruptionError):
        control_points(Patch(1, p.tiles[:4] + p.tiles[:1]))


def test_pair_histogram_argument_checks():
    pts = control_points(generate_patch(2))
    with pytest.raises(ValueError):
        pair_histogram(pts, 5, window="eroded", margin=1)
    with pytest.raises(ValueError):
        pair_histogram(pts, -1)
    with pytest.raises(ValueError):
        pair_histogram([], 5)
    with pytest.raises(ValueError):
        pair_histogram(pts, 5, window="round")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-40, 40), st.integers(-40, 40)), min_size=2, max_size=30,
                unique=True),
       st.integers(1, 200))
def test_random_lattice_sets_match_brute_force(coords, r_max_sq):
    pts = [ExactPoint(Fraction(x, 10), Fraction(y, 4)) for x, y in coords]
    assert pair_histogram(pts, Fraction(r_max_sq, 10)).entries == \
        brute_force_histogram(pts, Fraction(r_max_sq, 10))


def test_estimator_api():
    est = ShellFrequencyEstimator(r_max_sq=5, margin=3)
    assert est.get_params() == {"r_max_sq": 5, "window": "eroded", "margin": 3, "workers": 1}
    twin = clone(est).set_params(workers=2)
    p = generate_patch(5)
    est.fit(p)
    twin.fit(p)
    out = est.predict([Fraction(1), "8/5", 7])
    assert out[2] == 0.0 and out[0] > 2
    np.testing.assert_array_equal(out, twin.predict([Fraction(1), "8/5", 7]))
    assert est.n_points_ == 3125
    assert math.isclose(est.density_, est.histogram_.point_count / est.histogram_.window_area)
    raw = ShellFrequencyEstimator(window="full").fit(control_points(p))
    assert raw.histogram_.window_area == 3125
