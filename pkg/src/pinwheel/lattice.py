"""Square-lattice side: two-square counts, lattice shells, dual lattices and the
idealised multi-grain powder.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import CapacityError, CoincidenceError

__all__ = [
    "ShellingEntry",
    "LatticeBasis",
    "PowderModel",
    "PowderPoints",
    "PowderDecomposition",
    "PSFPair",
    "Ring",
    "SIEVE_LIMIT",
    "r2",
    "r2_bruteforce",
    "r2_table",
    "shelling",
    "lattice_shelling",
    "dual_basis",
    "radial_psf_pair",
    "powder_pointset",
    "powder_decomposition",
    "powder_rings",
]

SIEVE_LIMIT = 10**6
BRUTEFORCE_LIMIT = 10**8
DEFAULT_POINT_BUDGET = 10**7


@lru_cache(maxsize=1)
def _primes() -> tuple[int, ...]:
    is_prime = np.ones(SIEVE_LIMIT + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(SIEVE_LIMIT) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return tuple(int(p) for p in np.flatnonzero(is_prime))


def _factor(n: int) -> dict[int, int]:
    if n > SIEVE_LIMIT**2:
        raise CapacityError(f"n={n} is beyond the trial-division range {SIEVE_LIMIT**2}")
    out: dict[int, int] = {}
    for p in _primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def r2(n: int) -> int:
    """Number of ordered signed pairs (p, q) with p^2 + q^2 = n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1
    count = 4
    for p, e in _factor(n).items():
        if p % 4 == 3:
            if e % 2:
                return 0
        elif p % 4 == 1:
            count *= e + 1
    return count


def r2_bruteforce(n: int) -> int:
    """Direct enumeration of representations; the oracle for :func:`r2`."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > BRUTEFORCE_LIMIT:
        raise CapacityError(f"brute force guarded at n <= {BRUTEFORCE_LIMIT}")
    count = 0
    m = math.isqrt(n)
    for p in range(-m, m + 1):
        rest = n - p * p
        q = math.isqrt(rest)
        if q * q == rest:
            count += 1 if q == 0 else 2
    return count


def r2_table(n_max: int) -> np.ndarray:
    """r2(0..n_max) at once via r2(n) = 4 * sum_{d | n} chi_4(d)."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if n_max > 10**8:
        raise CapacityError("table size guarded at 1e8")
    acc = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1, 4):
        acc[d::d] += 1
    for d in range(3, n_max + 1, 4):
        acc[d::d] -= 1
    acc *= 4
    acc[0] = 1
    return acc


class ShellingEntry(NamedTuple):
    n: int
    r: float
    eta_sq: int


def shelling(n_max: int) -> list[ShellingEntry]:
    """Non-empty shells of Z^2 with squared radius up to ``n_max``."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    table = r2_table(n_max)
    return [ShellingEntry(int(n), math.sqrt(n), int(table[n]))
            for n in np.flatnonzero(table)]


def _frac_pair(v) -> tuple[Fraction, Fraction]:
    a, b = v
    return Fraction(a), Fraction(b)


@dataclass(frozen=True)
class LatticeBasis:
    """Lattice spanned by ``sqrt(scale_sq) * b1`` and ``sqrt(scale_sq) * b2``.

    The basis vectors are exact rationals; ``scale_sq`` lets lattices such as
    5^(-1/2) Z^2 keep rational squared lengths.
    """

    b1: tuple[Fraction, Fraction]
    b2: tuple[Fraction, Fraction]
    scale_sq: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "b1", _frac_pair(self.b1))
        object.__setattr__(self, "b2", _frac_pair(self.b2))
        object.__setattr__(self, "scale_sq", Fraction(self.scale_sq))
        if self.scale_sq <= 0:
            raise ValueError("scale_sq must be positive")

    @property
    def determinant(self) -> Fraction:
        """Determinant of the unscaled matrix with columns b1, b2."""
        return self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]

    @property
    def density(self) -> Fraction:
        """Points per unit area of the scaled lattice."""
        return 1 / (abs(self.determinant) * self.scale_sq)

    def gram(self) -> tuple[Fraction, Fraction, Fraction]:
        g11 = self.scale_sq * (self.b1[0] ** 2 + self.b1[1] ** 2)
        g12 = self.scale_sq * (self.b1[0] * self.b2[0] + self.b1[1] * self.b2[1])
        g22 = self.scale_sq * (self.b2[0] ** 2 + self.b2[1] ** 2)
        return g11, g12, g22


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """Inverse transpose of the basis matrix (exact)."""
    det = basis.determinant
    if det == 0:
        raise ValueError("singular basis")
    (a, c), (b, d) = basis.b1, basis.b2  # columns b1 = (a, c), b2 = (b, d)
    # M = [[a, b], [c, d]]; M^{-T} = [[d, -c], [-b, a]] / det
    return LatticeBasis((d / det, -b / det), (-c / det, a / det), 1 / basis.scale_sq)


def lattice_shelling(basis: LatticeBasis, r_max_sq, budget: int = DEFAULT_POINT_BUDGET
                     ) -> list[tuple[Fraction, int]]:
    """Shells ``(squared radius, multiplicity)`` of the lattice inside the closed ball."""
    if basis.determinant == 0:
        raise ValueError("singular basis")
    r_max_sq = Fraction(r_max_sq)
    g11, g12, g22 = basis.gram()
    det_g = g11 * g22 - g12 * g12
    # extent of the ellipse m^2 g11 + 2 m n g12 + n^2 g22 <= R^2 along each coefficient
    m_max = math.isqrt(math.floor(r_max_sq * g22 / det_g)) + 1
    n_max = math.isqrt(math.floor(r_max_sq * g11 / det_g)) + 1
    if (2 * m_max + 1) * (2 * n_max + 1) > budget:
        raise CapacityError(f"enumeration of {(2 * m_max + 1) * (2 * n_max + 1)} "
                            f"coefficient pairs exceeds the budget {budget}")
    shells: Counter = Counter()
    for m in range(-m_max, m_max + 1):
        for n in range(-n_max, n_max + 1):
            q = m * m * g11 + 2 * m * n * g12 + n * n * g22
            if q <= r_max_sq:
                shells[q] += 1
    return sorted(shells.items())


class PSFPair(NamedTuple):
    """Both sides of the radial Poisson summation formula as ring data."""

    lhs: list[tuple[Fraction, Fraction]]
    rhs: list[tuple[Fraction, Fraction]]
    density: Fraction


def radial_psf_pair(basis: LatticeBasis, r_max_sq, budget: int = DEFAULT_POINT_BUDGET) -> PSFPair:
    """Rings of the lattice (weights eta) against rings of its dual (weights dens * eta*)."""
    dens = basis.density
    lhs = [(q, Fraction(c)) for q, c in lattice_shelling(basis, r_max_sq, budget)]
    rhs = [(q, dens * c) for q, c in lattice_shelling(dual_basis(basis), r_max_sq, budget)]
    return PSFPair(lhs, rhs, dens)


class Ring(NamedTuple):
    n: int
    r: float
    intensity: int


def powder_rings(n_max: int) -> list[Ring]:
    """Powder rings of Z^2: radius sqrt(n), total intensity r2(n), for 1 <= n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return [Ring(e.n, e.r, e.eta_sq) for e in shelling(n_max) if e.n > 0]


@dataclass(frozen=True)
class PowderModel:
    """N copies of Z^2 rotated by multiples of ``angle``, cut to the ball of ``radius``."""

    grains: int = 8
    angle: float = 1.0
    radius: float = 50.0

    def __post_init__(self):
        if self.grains < 1:
            raise ValueError("grains must be positive")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")


@dataclass
class PowderPoints:
    coords: np.ndarray          # (M, 2) float, rotated positions
    lattice: np.ndarray         # (M, 2) int, Z^2 preimages
    grain: np.ndarray           # (M,) int, 1..N
    weights: np.ndarray         # (M,) float, 1/N each

    def __len__(self) -> int:
        return len(self.grain)


def _disk_lattice_points(radius: float) -> np.ndarray:
    m = int(math.floor(radius))
    ax = np.arange(-m, m + 1)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    P = np.stack([X.ravel(), Y.ravel()], axis=1)
    return P[(P**2).sum(axis=1) <= radius * radius]


COINCIDENCE_TOL = 1e-9


def powder_pointset(model: PowderModel, check: bool = True) -> PowderPoints:
    """Realise the weighted union of R^j Z^2 within the ball, j = 1..N."""
    P = _disk_lattice_points(model.radius)
    coords, lattice, grain = [], [], []
    for j in range(1, model.grains + 1):
        c, s = math.cos(j * model.angle), math.sin(j * model.angle)
        rot = np.array([[c, -s], [s, c]])
        coords.append(P @ rot.T)
        lattice.append(P)
        grain.append(np.full(len(P), j))
    pts = PowderPoints(np.vstack(coords), np.vstack(lattice), np.concatenate(grain),
                       np.full(len(P) * model.grains, 1.0 / model.grains))
    if check and model.grains > 1:
        pairs = cKDTree(pts.coords).query_pairs(COINCIDENCE_TOL, output_type="ndarray")
        if len(pairs):
            a, b = pairs[:, 0], pairs[:, 1]
            at_origin = ~pts.lattice[a].any(axis=1) & ~pts.lattice[b].any(axis=1)
            bad = (pts.grain[a] != pts.grain[b]) & ~at_origin
            if bad.any():
                i = int(a[bad][0])
                raise CoincidenceError(
                    f"grains share the point {pts.coords[i].tolist()}; choose a different angle")
    return pts


@dataclass
class PowderDecomposition:
    """Per-area ordered-pair weights split into same-grain shells and cross-grain bins."""

    model: PowderModel
    same: dict[int, float]                 # squared radius n -> weight / area
    same_counts: dict[int, int]            # ordered pairs per grain
    bin_edges: np.ndarray
    cross: np.ndarray                      # weight / area per bin
    area: float
    r_max: float
    extras: dict = field(default_factory=dict)

    def same_total(self) -> float:
        return float(sum(self.same.values()))

    def cross_total(self) -> float:
        return float(self.cross.sum())


def _same_grain_counts(P: np.ndarray, radius: float, n_max: int) -> dict[int, int]:
    m = math.isqrt(n_max)
    out = {}
    for dx in range(-m, m + 1):
        for dy in range(-m, m + 1):
            n = dx * dx + dy * dy
            if n == 0 or n > n_max:
                continue
            Q = P + np.array([dx, dy])
            c = int(np.count_nonzero((Q**2).sum(axis=1) <= radius * radius))
            if c:
                out[n] = out.get(n, 0) + c
    return dict(sorted(out.items()))


def powder_decomposition(model: PowderModel, r_max: float = math.sqrt(5),
                         bin_width: float = 0.01) -> PowderDecomposition:
    """Split the ordered pairs of the powder into same-grain and cross-grain parts.

    Same-grain pairs are counted exactly on the Z^2 preimages (rotation maps the
    ball to itself, so every grain contributes the same counts).  Cross-grain
    distances are binned with width ``bin_width`` on ``[0, r_max]``.  Weights are
    ``1/N^2`` per ordered pair, divided by the ball area.
    """
    if not r_max > 0 or not bin_width > 0:
        raise ValueError("r_max and bin_width must be positive")
    N = model.grains
    area = math.pi * model.radius**2
    pts = powder_pointset(model)
    P = _disk_lattice_points(model.radius)
    n_max = math.floor(r_max * r_max + 1e-9)
    counts = _same_grain_counts(P, model.radius, n_max)
    same = {n: N * c / N**2 / area for n, c in counts.items()}

    nbins = int(math.ceil(r_max / bin_width - 1e-9))
    edges = np.arange(nbins + 1) * bin_width
    cross = np.zeros(nbins)
    same_kd = 0
    if len(pts):
        # rotated shells sit on r_max up to rounding, so query a hair wider
        reach = r_max * (1 + 1e-9)
        pairs = cKDTree(pts.coords).query_pairs(reach, output_type="ndarray")
        if len(pairs):
            a, b = pairs[:, 0], pairs[:, 1]
            is_cross = pts.grain[a] != pts.grain[b]
            same_kd = 2 * int(np.count_nonzero(~is_cross))
            d = np.linalg.norm(pts.coords[a[is_cross]] - pts.coords[b[is_cross]], axis=1)
            idx = np.minimum((d / bin_width).astype(np.int64), nbins - 1)
            cross = 2.0 * np.bincount(idx, minlength=nbins)[:nbins] / N**2 / area
    return PowderDecomposition(model, same, counts, edges, cross, area, r_max,
                               {"same_pairs_kdtree": same_kd})
