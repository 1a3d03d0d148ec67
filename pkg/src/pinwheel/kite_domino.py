"""Kite and domino tiles obtained by pairing pinwheel triangles along hypotenuses."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .exact import ExactPoint, orientation
from .exceptions import PatchCorruptionError
from .substitution import Patch, PlacedTriangle, generate_patch

__all__ = ["TilePair", "MatchReport", "KDStats", "classify_pair", "pair_tiles", "kd_stats",
           "kd_series"]


class TilePair(NamedTuple):
    first: int
    second: int
    kind: str


@dataclass
class MatchReport:
    pairs: list[TilePair]
    boundary_unmatched: list[int]
    interior_unmatched: list[int] = field(default_factory=list)
    tile_count: int = 0

    @property
    def kite_count(self) -> int:
        return sum(p.kind == "kite" for p in self.pairs)

    @property
    def domino_count(self) -> int:
        return sum(p.kind == "domino" for p in self.pairs)

    @property
    def perfect_interior(self) -> bool:
        return not self.interior_unmatched


def _reflect_across(p: ExactPoint, a: ExactPoint, b: ExactPoint) -> ExactPoint:
    d = b - a
    t = (p - a).dot(d) / d.norm_sq()
    foot = a + d * t
    return foot * 2 - p


def classify_pair(t1: PlacedTriangle, t2: PlacedTriangle) -> str:
    """``"domino"`` if t2 is t1 turned half way about the hypotenuse midpoint,
    ``"kite"`` if t2 is t1 mirrored in the hypotenuse line."""
    if t1 == t2 or t1.vertices == t2.vertices:
        raise PatchCorruptionError("a triangle cannot pair with itself")
    if t1.hypotenuse != t2.hypotenuse:
        raise PatchCorruptionError("triangles do not share a hypotenuse")
    s, l = t1.s, t1.l
    if t2.r == s + l - t1.r and t2.s == l and t2.l == s:
        return "domino"
    if t2.r == _reflect_across(t1.r, s, l) and t2.s == s and t2.l == l:
        return "kite"
    raise PatchCorruptionError("shared hypotenuse but neither a kite nor a domino")


def _on_boundary(t: PlacedTriangle, region: Sequence[ExactPoint]) -> bool:
    for i in range(3):
        a, b = region[i], region[(i + 1) % 3]
        if orientation(a, b, t.s) == 0 and orientation(a, b, t.l) == 0:
            return True
    return False


def pair_tiles(patch: Patch) -> MatchReport:
    """Match tiles whose hypotenuses coincide exactly."""
    buckets: dict[frozenset, list[int]] = defaultdict(list)
    for i, t in enumerate(patch.tiles):
        buckets[t.hypotenuse].append(i)
    region = patch.region
    pairs, boundary, interior = [], [], []
    for idx in buckets.values():
        if len(idx) > 2:
            raise PatchCorruptionError(f"hypotenuse shared by {len(idx)} tiles: {idx}")
        if len(idx) == 2:
            i, j = idx
            pairs.append(TilePair(i, j, classify_pair(patch.tiles[i], patch.tiles[j])))
        elif _on_boundary(patch.tiles[idx[0]], region):
            boundary.append(idx[0])
        else:
            interior.append(idx[0])
    pairs.sort()
    return MatchReport(pairs, sorted(boundary), sorted(interior), len(patch.tiles))


class KDStats(NamedTuple):
    kite_fraction: float
    domino_fraction: float
    kites: int
    dominoes: int


def kd_stats(report: MatchReport) -> KDStats:
    k, d = report.kite_count, report.domino_count
    n = k + d
    if n == 0:
        return KDStats(0.0, 0.0, 0, 0)
    return KDStats(k / n, d / n, k, d)


def kd_series(depths: Iterable[int]) -> list[tuple[int, KDStats]]:
    """Kite/domino fractions for a sequence of patch depths."""
    return [(d, kd_stats(pair_tiles(generate_patch(d)))) for d in depths]
