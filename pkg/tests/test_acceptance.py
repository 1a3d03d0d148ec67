"""Acceptance criteria, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -s``; one PASS/FAIL line per
criterion is printed and repeated in the terminal summary.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
import scipy.special
from conftest import ACCEPTANCE_LINES, hist_at
from scipy.optimize import brentq

from pinwheel import cli
from pinwheel.bessel import bessel_j0
from pinwheel.diffraction import adjacent_troughs, detect_peaks, overlay_powder, radial_intensity
from pinwheel.kite_domino import kd_stats, pair_tiles
from pinwheel.lattice import (
    LatticeBasis,
    PowderModel,
    powder_decomposition,
    powder_rings,
    r2,
    r2_bruteforce,
    r2_table,
    radial_psf_pair,
)
from pinwheel.stats import control_points, eta_estimate, histogram_from_patch, proposition_checks
from pinwheel.substitution import generate_patch, iter_subdivisions, verify_partition
from pinwheel.validation import make_k_grid


def report(cid, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid:>2}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_c01_exact_subdivision():
    t0 = time.perf_counter()
    generate_patch(7)
    failures = checked = 0
    for parent, kids in iter_subdivisions(7):
        checked += 1
        failures += not verify_partition(parent, kids)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    report(1, ok, f"{checked} subdivisions, {failures} failures, {elapsed:.1f}s (< 30s)")
    assert ok


ETA_ROWS = [
    ("1/5", Fraction(5, 11), 0.02),
    ("1", Fraction(439, 165), 0.02),
    ("8/5", Fraction(1, 2), 0.02),
    ("9/5", Fraction(67, 165), 0.03),
    ("13/5", Fraction(142, 165), 0.03),
    ("49/25", Fraction(4, 165), 0.10),
    ("81/25", Fraction(4, 165), 0.10),
    ("2", Fraction(7, 2), 0.05),
    ("4", Fraction(3), 0.05),
    ("5", Fraction(73, 15), 0.05),
]


def test_c02_frequency_table():
    t0 = time.perf_counter()
    h = histogram_from_patch(generate_patch(7), 5, window="eroded", margin=3)
    elapsed = time.perf_counter() - t0
    est = {e.r_sq: e.eta_hat for e in eta_estimate(h)}
    bad = []
    for r_sq, exact, tol in ETA_ROWS:
        got = est.get(Fraction(r_sq), 0.0)
        dev = got / float(exact) - 1
        if abs(dev) > tol:
            bad.append(f"{r_sq}: {got:.5f} vs {exact} ({dev:+.2%})")
    ok = not bad and elapsed < 120
    worst = max(abs(est.get(Fraction(r), 0.0) / float(e) - 1) for r, e, _ in ETA_ROWS)
    report(2, ok, f"depth 7 eroded m=3, worst |dev| {worst:.2%}, {elapsed:.1f}s (< 120s)"
                  + (f"; out of tolerance: {bad}" if bad else ""))
    assert ok


def test_c03_exact_membership():
    details, ok = [], True
    for depth in range(7):
        rep = proposition_checks(control_points(generate_patch(depth)), 5)
        ok &= rep.ok
        details.append(f"d{depth}:{rep.n_points}pts/{rep.n_keys}keys")
    report(3, ok, "all of (i), (ii), (iii) hold at " + " ".join(details))
    assert ok


def test_c04_number_theory():
    agree = all(r2(n) == r2_bruteforce(n) for n in range(10**4 + 1))
    table = r2_table(10**6)
    bounds = []
    for N in (10**2, 10**4, 10**6):
        total = sum(r2(n) for n in range(1, N + 1)) if N <= 10**4 else int(table[1:].sum())
        bounds.append((N, abs(total - math.pi * N), 10 * math.sqrt(N) + 10))
    ok = agree and all(e <= b for _, e, b in bounds)
    report(4, ok, f"r2 == brute force for n <= 1e4: {agree}; circle errors "
                  + ", ".join(f"N={N}: {e:.1f} <= {b:.0f}" for N, e, b in bounds))
    assert ok


def test_c05_bessel():
    x = np.random.default_rng(20240601).uniform(0.0, 50.0, 10**5)
    err = float(np.max(np.abs(bessel_j0(x) - scipy.special.j0(x))))
    zero = brentq(lambda t: float(bessel_j0(t)), 2.0, 3.0, xtol=1e-14, rtol=1e-15)
    ok = err <= 1e-9 and abs(zero - 2.4048255577) <= 1e-8
    report(5, ok, f"max |err| {err:.2e} on 1e5 samples (<= 1e-9), first zero {zero:.11f}")
    assert ok


def test_c06_spectrum():
    t0 = time.perf_counter()
    h = hist_at(6, 1600, "full", 0)
    s = radial_intensity(h, make_k_grid(0.0, 4.0, 0.001), "bartlett")
    elapsed = time.perf_counter() - t0
    peaks = detect_peaks(s, k_min=0.25)
    found, ratios = {}, {}
    for target in (1.0, math.sqrt(2), 2.0, math.sqrt(5)):
        near = [p for p in peaks if abs(p.k - target) <= 0.03]
        if near:
            p = max(near, key=lambda q: q.height)
            found[target] = p
            lo, hi = adjacent_troughs(s, p.k)
            ratios[target] = (p.height, lo, hi)
    overlay = overlay_powder(s, powder_rings(25), peaks)
    i1 = int(np.argmin(np.abs(s.k_grid - overlay.first_peak.k)))
    scaled_first = float(overlay.intensity_scaled[i1])
    factor_ok = all(h_ >= 2 * lo and h_ >= 2 * hi for h_, lo, hi in ratios.values())
    ok = len(found) == 4 and scaled_first == 4.0 and factor_ok and elapsed < 300
    report(6, ok, "peaks " + ", ".join(f"{p.k:.3f}" for p in found.values())
           + f"; scaled first peak {scaled_first!r}; peak >= 2x troughs: {factor_ok}; "
           f"{elapsed:.1f}s (< 300s)")
    assert ok


def test_c07_kite_domino():
    interior = {d: len(pair_tiles(generate_patch(d)).interior_unmatched) for d in range(7)}
    st5 = kd_stats(pair_tiles(generate_patch(5)))
    st7 = kd_stats(pair_tiles(generate_patch(7)))
    drift = abs(st5.kite_fraction - st7.kite_fraction)
    ok = (not any(interior.values()) and st7.kites > 0 and st7.dominoes > 0 and drift <= 0.02)
    report(7, ok, f"interior unmatched {sum(interior.values())} at depths 0-6; kite fraction "
                  f"{st5.kite_fraction:.4f} (d5) vs {st7.kite_fraction:.4f} (d7), drift {drift:.4f}")
    assert ok


@pytest.mark.xfail(strict=True, reason="cross-grain pairs form a Lebesgue part of density "
                   "(N-1)/N * 2 pi r dr, which passes 10% of the n=1 shell weight for r > 0.9")
def test_c08_powder():
    dec = powder_decomposition(PowderModel(8, 1.0, 50.0), math.sqrt(5), 0.01)
    ratios = {n: dec.same[n] / (r2(n) / 8) for n in (1, 2, 4, 5)}
    same_ok = all(abs(v - 1) <= 0.05 for v in ratios.values())
    limit = 0.1 * dec.same[1]
    worst = int(np.argmax(dec.cross))
    cross_ok = float(dec.cross.max()) <= limit
    ok = same_ok and cross_ok
    report(8, ok, "same-grain ratios " + ", ".join(f"n={n}: {v:.3f}" for n, v in ratios.items())
           + f"; max cross bin {dec.cross[worst]:.4f} at r={dec.bin_edges[worst]:.2f} vs limit "
           f"{limit:.4f}; bins over limit {int(np.sum(dec.cross > limit))}/{len(dec.cross)}")
    assert ok


def test_c09_psf_self_duality():
    pair = radial_psf_pair(LatticeBasis((1, 0), (0, 1)), 100)
    ok = pair.lhs == pair.rhs and pair.density == 1
    report(9, ok, f"Z^2 rings up to r^2 = 100: {len(pair.lhs)} rings, LHS == RHS exactly: "
                  f"{pair.lhs == pair.rhs}")
    assert ok


DETERMINISM_RUNS = [
    ["generate", "--depth", "5"],
    ["points", "--depth", "5"],
    ["hist", "--depth", "6"],
    ["hist", "--depth", "5", "--window", "full", "--r-max-sq", "400", "--out", "hist_full.csv"],
    ["eta", "--depth", "6"],
    ["pairs", "--depth", "5"],
    ["diffract", "--depth", "5", "--r-max-sq", "400", "--k-step", "0.005"],
    ["compare", "--depth", "5", "--r-max-sq", "400", "--k-step", "0.005"],
    ["powder-sim", "--grains", "4", "--radius", "20"],
]


def test_c10_determinism(tmp_path, monkeypatch):
    outputs = {}
    for w in (1, 4, 8):
        d = tmp_path / f"w{w}"
        d.mkdir()
        monkeypatch.chdir(d)
        for argv in DETERMINISM_RUNS:
            assert cli.main(["--workers", str(w), *argv]) == 0
        outputs[w] = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
    ok = outputs[1] == outputs[4] == outputs[8]
    report(10, ok, f"{len(outputs[1])} files byte-identical across workers 1, 4, 8: {ok}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
