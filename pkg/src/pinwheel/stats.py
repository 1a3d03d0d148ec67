"""Control-point statistics: exact pair-distance histograms and shell frequencies.

The autocorrelation of the control points is a sum of uniform circle measures
weighted by shell frequencies eta(r).  A finite patch estimates eta(r) as the
number of ordered pairs (x, y) at distance r, with x in an observation
window, divided by the window area.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exact import (
    ZERO_KEY,
    DistanceKey,
    ExactPoint,
    normalize,
    rotation_membership,
    squared_distance,
)
from .exceptions import PatchCorruptionError
from .lattice import r2
from .substitution import Patch, control_point
from .validation import check_r_max_sq, check_window

__all__ = [
    "DistanceHistogram",
    "FrequencyEstimate",
    "ReferenceRow",
    "PropositionReport",
    "ShellFrequencyEstimator",
    "control_points",
    "integer_embedding",
    "window_mask",
    "window_area",
    "pair_histogram",
    "histogram_from_patch",
    "brute_force_histogram",
    "eta_estimate",
    "eta_exact_reference",
    "proposition_checks",
    "motif_frequency",
]

DEFAULT_MARGIN = 3


def control_points(patch: Patch) -> list[ExactPoint]:
    """One control point per tile, in tile order."""
    pts = [control_point(t) for t in patch.tiles]
    if len(set(pts)) != len(pts):
        raise PatchCorruptionError("two tiles share a control point")
    return pts


# -- integer embedding ---------------------------------------------------------

_INT64_SAFE = 1 << 30   # |coord| below this keeps dx^2 + dy^2 inside int64


@dataclass
class IntegerEmbedding:
    """Points scaled to integers by the common denominator 2^two_exp * 5^five_exp."""

    X: np.ndarray
    Y: np.ndarray
    two_exp: int
    five_exp: int

    @property
    def denominator(self) -> int:
        return (1 << self.two_exp) * 5**self.five_exp

    def key(self, s2: int) -> DistanceKey:
        """DistanceKey of a squared integer distance in embedding units."""
        return DistanceKey.from_scalar(normalize(int(s2), 2 * self.two_exp, 2 * self.five_exp))

    def scale_sq(self, value: Fraction) -> Fraction:
        return value * self.denominator**2


def integer_embedding(points: Sequence[ExactPoint],
                      extra: Sequence[ExactPoint] = ()) -> tuple[IntegerEmbedding, list]:
    """Scale ``points`` (and ``extra``) to a shared integer grid.

    Returns the embedding of ``points`` and the integer pairs of ``extra``.
    Falls back to Python-int object arrays when coordinates could overflow int64.
    """
    every = list(points) + list(extra)
    A = max((max(p.x.two_exp, p.y.two_exp) for p in every), default=0)
    B = max((max(p.x.five_exp, p.y.five_exp) for p in every), default=0)
    xs = [p.x.scaled_int(A, B) for p in points]
    ys = [p.y.scaled_int(A, B) for p in points]
    big = max((max(abs(x), abs(y)) for x, y in zip(xs, ys)), default=0)
    dtype = np.int64 if big < _INT64_SAFE else object
    emb = IntegerEmbedding(np.array(xs, dtype=dtype), np.array(ys, dtype=dtype), A, B)
    ext = [(p.x.scaled_int(A, B), p.y.scaled_int(A, B)) for p in extra]
    return emb, ext


# -- windows -----------------------------------------------------------------------


def window_mask(emb: IntegerEmbedding, region_ints, margin: Fraction) -> np.ndarray:
    """Exact test: distance from each point to every region edge is at least ``margin``."""
    n = len(emb.X)
    if margin == 0:
        return np.ones(n, dtype=bool)
    X = emb.X.astype(object)
    Y = emb.Y.astype(object)
    (ax, ay), (bx, by), (cx, cy) = region_ints
    o = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    o = 1 if o > 0 else -1
    D = emb.denominator
    p, q = margin.numerator, margin.denominator
    mask = np.ones(n, dtype=bool)
    verts = region_ints
    for i in range(3):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % 3]
        ex, ey = x1 - x0, y1 - y0
        cross = (ex * (Y - y0) - ey * (X - x0)) * o
        lhs = cross * cross * (q * q)
        rhs = p * p * D * D * (ex * ex + ey * ey)
        mask &= np.array([(c >= 0) and (l >= rhs) for c, l in zip(cross, lhs)], dtype=bool)
    return mask


def _triangle_area(region: Sequence[ExactPoint]) -> Fraction:
    a, b, c = region
    return abs(((b - a).cross(c - a)).as_fraction()) / 2


def window_area(region: Sequence[ExactPoint], margin: Fraction = Fraction(0)) -> float:
    """Area of the triangle shrunk inward by ``margin``.

    The inner parallel set of a triangle is the homothetic triangle about the
    incentre with ratio 1 - margin / inradius.
    """
    area = _triangle_area(region)
    if margin == 0:
        return float(area)
    a, b, c = region
    perimeter = sum(math.sqrt((u - v).norm_sq().as_fraction()) for u, v in ((a, b), (b, c), (c, a)))
    inradius = 2 * float(area) / perimeter
    shrink = 1 - float(margin) / inradius
    if shrink <= 0:
        raise ValueError(f"margin {float(margin)} empties the window (inradius {inradius:.6g})")
    return float(area) * shrink * shrink


# -- histograms ------------------------------------------------------------------------


@dataclass
class DistanceHistogram:
    """Ordered-pair counts by exact squared distance.

    Pairs (x, y) with x != y, x in the window and ``|x - y|^2 <= r_max_sq``;
    keys are ascending.
    """

    entries: dict[DistanceKey, int]
    window_area: float
    point_count: int
    r_max_sq: DistanceKey
    window: str = "full"
    margin: float = 0.0
    depth: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = dict(sorted(self.entries.items()))

    def __len__(self) -> int:
        return len(self.entries)

    def count(self, key) -> int:
        return self.entries.get(DistanceKey.from_value(key), 0)

    @property
    def total_pairs(self) -> int:
        return sum(self.entries.values())

    def merged(self, other: "DistanceHistogram") -> "DistanceHistogram":
        """Disjoint union of pair multisets, keeping this histogram's normalisation."""
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return DistanceHistogram(out, self.window_area, self.point_count + other.point_count,
                                 max(self.r_max_sq, other.r_max_sq), self.window, self.margin)

    def radii(self) -> np.ndarray:
        return np.array([math.sqrt(k.value) for k in self.entries], dtype=float)

    def counts(self) -> np.ndarray:
        return np.array(list(self.entries.values()), dtype=np.int64)


def _cell_groups(cx: np.ndarray, cy: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    order = np.lexsort((cy, cx))
    groups: dict[tuple[int, int], np.ndarray] = {}
    if len(order) == 0:
        return groups
    sx, sy = cx[order], cy[order]
    change = np.flatnonzero((sx[1:] != sx[:-1]) | (sy[1:] != sy[:-1])) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [len(order)]])
    for s, e in zip(starts, ends):
        groups[(int(sx[s]), int(sy[s]))] = order[s:e]
    return groups


_BLOCK = 1 << 22


def _count_cells(cells, emb, cell_all, cell_win, R2) -> tuple[np.ndarray, np.ndarray]:
    X, Y = emb.X, emb.Y
    found = []
    for c in cells:
        xi = cell_win[c]
        nbrs = [cell_all[(c[0] + dx, c[1] + dy)]
                for dx in (-1, 0, 1) for dy in (-1, 0, 1)
                if (c[0] + dx, c[1] + dy) in cell_all]
        yj = np.concatenate(nbrs)
        Xj, Yj = X[yj], Y[yj]
        rows = max(1, _BLOCK // max(1, len(yj)))
        for s in range(0, len(xi), rows):
            xs = xi[s:s + rows]
            dx = Xj[None, :] - X[xs][:, None]
            dy = Yj[None, :] - Y[xs][:, None]
            s2 = dx * dx + dy * dy
            sel = s2[(s2 <= R2) & (s2 > 0)]
            if len(sel):
                found.append(np.unique(sel, return_counts=True))
    return _merge_counts(found, emb.X.dtype)


def _merge_counts(parts, dtype) -> tuple[np.ndarray, np.ndarray]:
    if not parts:
        return np.array([], dtype=dtype), np.array([], dtype=np.int64)
    keys = np.concatenate([k for k, _ in parts])
    cnts = np.concatenate([c for _, c in parts]).astype(np.int64)
    uniq, inv = np.unique(keys, return_inverse=True)
    total = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(total, inv.ravel(), cnts)
    return uniq, total


def pair_histogram(points: Sequence[ExactPoint], r_max_sq, window: str = "full",
                   margin=0, region: Sequence[ExactPoint] | None = None,
                   area: float | None = None, workers: int = 1,
                   depth: int | None = None) -> DistanceHistogram:
    """Exact ordered-pair distance histogram using cell lists of side >= r_max.

    ``region`` is the triangle the points tile; the window is either the whole
    region or the region shrunk by ``margin``.  Without a region only the full
    window is available and the area defaults to ``len(points)`` (unit density)
    unless ``area`` is given.
    """
    r_key = check_r_max_sq(r_max_sq)
    window, margin_q = check_window(window, margin)
    if window == "full":
        margin_q = Fraction(0)
    if window == "eroded" and region is None:
        raise ValueError("an eroded window needs the patch region")
    if not points:
        raise ValueError("empty point set")
    emb, reg = integer_embedding(points, region or ())
    if region is not None:
        mask = window_mask(emb, reg, margin_q)
        w_area = window_area(region, margin_q) if area is None else float(area)
    else:
        mask = np.ones(len(points), dtype=bool)
        w_area = float(len(points)) if area is None else float(area)
    n_win = int(mask.sum())
    if n_win == 0:
        raise ValueError("the window contains no points")

    R2q = emb.scale_sq(r_key.value)
    R2 = math.floor(R2q)
    C = math.isqrt(R2)
    if C * C < R2q:
        C += 1
    C = max(C, 1)
    cx = emb.X // C
    cy = emb.Y // C
    if cx.dtype == object:
        cx = cx.astype(np.int64)
        cy = cy.astype(np.int64)
    cell_all = _cell_groups(cx, cy)
    win_idx = np.flatnonzero(mask)
    cell_win = _cell_groups(cx[win_idx], cy[win_idx])
    cell_win = {c: win_idx[v] for c, v in cell_win.items()}
    cells = sorted(cell_win)
    R2_arr = R2 if emb.X.dtype == object else np.int64(R2)

    if workers <= 1 or len(cells) < 2:
        uniq, cnt = _count_cells(cells, emb, cell_all, cell_win, R2_arr)
    else:
        chunks = [cells[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda cs: _count_cells(cs, emb, cell_all, cell_win, R2_arr),
                                  chunks))
        uniq, cnt = _merge_counts([p for p in parts if len(p[0])], emb.X.dtype)
    entries = {emb.key(s): int(c) for s, c in zip(uniq, cnt)}
    return DistanceHistogram(entries, w_area, n_win, r_key, window, float(margin_q), depth)


def brute_force_histogram(points: Sequence[ExactPoint], r_max_sq,
                          mask: Sequence[bool] | None = None) -> dict[DistanceKey, int]:
    """Quadratic double loop over exact keys; the oracle for :func:`pair_histogram`."""
    r_key = check_r_max_sq(r_max_sq)
    out: dict[DistanceKey, int] = {}
    for i, p in enumerate(points):
        if mask is not None and not mask[i]:
            continue
        for j, q in enumerate(points):
            if i == j:
                continue
            k = squared_distance(p, q)
            if k != ZERO_KEY and not r_key < k:
                out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def histogram_from_patch(patch: Patch, r_max_sq, window: str = "eroded",
                         margin=DEFAULT_MARGIN, workers: int = 1) -> DistanceHistogram:
    return pair_histogram(control_points(patch), r_max_sq, window=window, margin=margin,
                          region=patch.region, workers=workers, depth=patch.depth)


# -- frequencies -----------------------------------------------------------------------


class ReferenceRow(NamedTuple):
    r_sq: Fraction
    eta: Fraction
    starred: bool


_REFERENCE = (
    ("0", "1", False), ("1/5", "5/11", False), ("1", "439/165", False),
    ("8/5", "1/2", False), ("9/5", "67/165", False), ("49/25", "4/165", False),
    ("2", "7/2", True), ("13/5", "142/165", False), ("81/25", "4/165", False),
    ("17/5", "10/11", True), ("4", "3", True), ("113/25", "8/165", True),
    ("5", "73/15", True),
)


def eta_exact_reference() -> list[ReferenceRow]:
    """Published shell frequencies for r^2 <= 5; starred rows are numerical estimates."""
    return [ReferenceRow(Fraction(r), Fraction(e), s) for r, e, s in _REFERENCE]


def _reference_lookup() -> dict[DistanceKey, ReferenceRow]:
    return {DistanceKey.from_value(row.r_sq): row for row in eta_exact_reference()}


@dataclass
class FrequencyEstimate:
    key: DistanceKey
    eta_hat: float
    eta_exact: Fraction | None
    pair_count: int
    starred: bool = False

    @property
    def r_sq(self) -> Fraction:
        return self.key.value

    @property
    def relative_deviation(self) -> float | None:
        if self.eta_exact is None or self.eta_exact == 0:
            return None
        return self.eta_hat / float(self.eta_exact) - 1.0


def eta_estimate(h: DistanceHistogram) -> list[FrequencyEstimate]:
    """eta_hat = pair_count / window_area per key; the zero key carries the density."""
    if h.point_count <= 0:
        raise ValueError("empty histogram")
    ref = _reference_lookup()

    def row(key, count):
        r = ref.get(key)
        return FrequencyEstimate(key, count / h.window_area, r.eta if r else None, count,
                                 r.starred if r else False)

    return [row(ZERO_KEY, h.point_count)] + [row(k, c) for k, c in h.entries.items()]


def motif_frequency(points: Sequence[ExactPoint], motif: Sequence[ExactPoint],
                    histogram: DistanceHistogram | None = None, **hist_kwargs) -> float:
    """Frequency of two-point motifs congruent to ``motif`` (unordered, per unit area).

    For r > 0 this is eta(r) / 2, since the histogram counts ordered pairs.
    """
    if len(motif) != 2:
        raise ValueError("only two-point motifs are supported")
    key = squared_distance(motif[0], motif[1])
    if key == ZERO_KEY:
        raise ValueError("degenerate motif: the two points coincide")
    if histogram is None or histogram.r_max_sq < key:
        histogram = pair_histogram(points, key, **hist_kwargs)
    return histogram.count(key) / 2 / histogram.window_area


# -- membership checks --------------------------------------------------------------------


@dataclass
class PropositionReport:
    n_points: int
    n_keys: int
    n_pairs: int
    rotation_failures: list[ExactPoint]
    coordinate_failures: list[ExactPoint]
    distance_failures: list[DistanceKey]
    witnesses: dict[ExactPoint, tuple[int, int]] = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return not (self.rotation_failures or self.coordinate_failures or self.distance_failures)

    def summary(self) -> str:
        return (f"points={self.n_points} keys={self.n_keys} pairs={self.n_pairs} "
                f"(i) failures={len(self.rotation_failures)} "
                f"(ii) failures={len(self.coordinate_failures)} "
                f"(iii) failures={len(self.distance_failures)}")


def proposition_checks(points: Sequence[ExactPoint], r_max_sq=5, workers: int = 1,
                       histogram: DistanceHistogram | None = None) -> PropositionReport:
    """Verify, point by point and pair by pair, that

    (i)   every point lies in some rotated lattice R_{n theta} Z^2,
    (ii)  every coordinate lies in Z[1/5],
    (iii) every squared distance up to ``r_max_sq`` is (p^2 + q^2) / 5^l.

    Failures are collected, never raised.
    """
    rot_fail, coord_fail, witnesses = [], [], {}
    for p in points:
        if p.x.two_exp or p.y.two_exp:
            coord_fail.append(p)
        if p.x.num == 0 and p.y.num == 0:
            witnesses[p] = (0, 0)  # the origin is in every rotated lattice
            continue
        w = rotation_membership(p)
        if w is None:
            rot_fail.append(p)
        else:
            witnesses[p] = w
    if histogram is None:
        histogram = pair_histogram(points, r_max_sq, workers=workers)
    dist_fail = [k for k in histogram.entries
                 if k.residual_two_exp != 0 or r2(k.s) == 0]
    return PropositionReport(len(points), len(histogram.entries), histogram.total_pairs,
                             rot_fail, coord_fail, dist_fail, witnesses)


# -- estimator ------------------------------------------------------------------------------


class ShellFrequencyEstimator(BaseEstimator):
    """Estimate shell frequencies eta(r) of a planar point set.

    ``fit`` takes a :class:`~pinwheel.substitution.Patch` (its control points and
    region are used) or a sequence of ExactPoints.  ``predict`` maps squared
    radii to eta estimates, zero for shells that carry no pairs.

    Parameters
    ----------
    r_max_sq : int, Fraction or str
        Largest squared distance counted.
    window : {"full", "eroded"}
    margin : float
        Erosion margin for the eroded window.
    workers : int
        Threads for pair counting; results do not depend on it.
    """

    def __init__(self, r_max_sq=5, window="eroded", margin=DEFAULT_MARGIN, workers=1):
        self.r_max_sq = r_max_sq
        self.window = window
        self.margin = margin
        self.workers = workers

    def fit(self, X, y=None, region=None, area=None):
        if isinstance(X, Patch):
            region = X.region if region is None else region
            depth = X.depth
            X = control_points(X)
        else:
            depth = None
            if not all(isinstance(p, ExactPoint) for p in X):
                raise TypeError("X must be a Patch or a sequence of ExactPoint")
        window = self.window if region is not None else "full"
        self.histogram_ = pair_histogram(X, self.r_max_sq, window=window, margin=self.margin,
                                         region=region, area=area, workers=self.workers,
                                         depth=depth)
        self.estimates_ = eta_estimate(self.histogram_)
        self.n_points_ = len(X)
        self.density_ = self.estimates_[0].eta_hat
        return self

    def predict(self, r_sq):
        check_is_fitted(self, "histogram_")
        lookup = {e.key: e.eta_hat for e in self.estimates_}
        return np.array([lookup.get(DistanceKey.from_value(v), 0.0) for v in r_sq])
