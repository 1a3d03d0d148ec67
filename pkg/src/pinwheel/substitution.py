"""Pinwheel patches by exact subdivision of the (1, 2, sqrt 5) right triangle.

A patch of depth ``d`` is obtained by inflating the seed triangle ``d`` times
(complex multiplication by 2+i) and then subdividing every tile ``d`` times.
Subdivision is a fixed table of barycentric weights, so one rule serves both
chiralities and every placement.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .exact import ExactPoint, ExactScalar, orientation
from .exceptions import CapacityError

__all__ = [
    "PlacedTriangle",
    "Patch",
    "PartitionReport",
    "CHILD_CHIRALITY",
    "DEFAULT_MAX_DEPTH",
    "seed",
    "inflate",
    "subdivide",
    "generate_patch",
    "iter_subdivisions",
    "control_point",
    "verify_partition",
]

DEFAULT_MAX_DEPTH = 8

# Child chirality relative to the parent, children c1..c5.
CHILD_CHIRALITY = (-1, -1, 1, 1, -1)

# Barycentric weights on (R, S, L) as (integer numerators, 2-exponent, 5-exponent).
_F = ((0, 4, 1), 0, 1)      # (0, 4/5, 1/5)
_M = ((1, 0, 1), 1, 0)      # (1/2, 0, 1/2)
_G = ((0, 2, 3), 0, 1)      # (0, 2/5, 3/5)
_H = ((5, 4, 1), 1, 1)      # (1/2, 2/5, 1/10)


@dataclass(frozen=True, slots=True)
class PlacedTriangle:
    """A (1, 2, sqrt 5) triangle scaled by sqrt(5)^scale_exp.

    ``r`` is the right-angle vertex, ``s`` ends the short leg and ``l`` the
    long leg.  ``chirality`` is ``orientation(r, l, s)``.
    """

    r: ExactPoint
    s: ExactPoint
    l: ExactPoint
    chirality: int
    scale_exp: int = 0

    @classmethod
    def from_vertices(cls, r: ExactPoint, s: ExactPoint, l: ExactPoint,
                      scale_exp: int = 0) -> "PlacedTriangle":
        c = orientation(r, l, s)
        if c == 0:
            raise ValueError("degenerate triangle")
        return cls(r, s, l, c, scale_exp)

    @property
    def vertices(self) -> tuple[ExactPoint, ExactPoint, ExactPoint]:
        return self.r, self.s, self.l

    @property
    def hypotenuse(self) -> frozenset:
        return frozenset((self.s, self.l))

    def translate(self, v: ExactPoint) -> "PlacedTriangle":
        return PlacedTriangle(self.r + v, self.s + v, self.l + v, self.chirality, self.scale_exp)

    def double_area(self) -> ExactScalar:
        """Twice the signed area of (r, s, l); positive for counter-clockwise order."""
        return (self.s - self.r).cross(self.l - self.r)

    def check_sides(self) -> bool:
        unit = 5**self.scale_exp
        return ((self.s - self.r).norm_sq() == unit
                and (self.l - self.r).norm_sq() == 4 * unit
                and (self.l - self.s).norm_sq() == 5 * unit)


@dataclass(frozen=True)
class Patch:
    """``5**depth`` unit tiles covering the depth-fold inflation of the seed."""

    depth: int
    tiles: Sequence[PlacedTriangle] = field(repr=False)

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def region(self) -> tuple[ExactPoint, ExactPoint, ExactPoint]:
        """Vertices (r, s, l) of the inflated seed the patch tiles."""
        t = seed()
        for _ in range(self.depth):
            t = inflate(t)
        return t.vertices

    @property
    def area(self) -> int:
        return 5**self.depth


def seed() -> PlacedTriangle:
    half = ExactScalar(1, 1, 0)
    return PlacedTriangle.from_vertices(
        ExactPoint(-half, -half), ExactPoint(half, -half), ExactPoint(-half, 3 * half))


def _inflate_point(p: ExactPoint) -> ExactPoint:
    return ExactPoint._raw(2 * p.x - p.y, p.x + 2 * p.y)


def inflate(t: PlacedTriangle) -> PlacedTriangle:
    """Multiply every vertex by 2+i (rotation by arctan(1/2), scaling by sqrt 5)."""
    return PlacedTriangle(_inflate_point(t.r), _inflate_point(t.s), _inflate_point(t.l),
                          t.chirality, t.scale_exp + 1)


def _bary(rule, R: ExactPoint, S: ExactPoint, L: ExactPoint) -> ExactPoint:
    w, two, five = rule
    return ExactPoint._raw(ExactScalar.combine(w, (R.x, S.x, L.x), two, five),
                           ExactScalar.combine(w, (R.y, S.y, L.y), two, five))


def subdivide(T: PlacedTriangle) -> tuple[PlacedTriangle, ...]:
    """Split a triangle of scale ``m >= 1`` into five of scale ``m - 1``."""
    if T.scale_exp < 1:
        raise ValueError("cannot subdivide a unit tile")
    R, S, L = T.r, T.s, T.l
    F = _bary(_F, R, S, L)
    M = _bary(_M, R, S, L)
    G = _bary(_G, R, S, L)
    H = _bary(_H, R, S, L)
    c, m = T.chirality, T.scale_exp - 1
    x1, x2, x3, x4, x5 = CHILD_CHIRALITY
    return (
        PlacedTriangle(F, S, R, c * x1, m),
        PlacedTriangle(H, R, M, c * x2, m),
        PlacedTriangle(H, F, M, c * x3, m),
        PlacedTriangle(G, M, F, c * x4, m),
        PlacedTriangle(G, M, L, c * x5, m),
    )


def _expand(t: PlacedTriangle) -> list[PlacedTriangle]:
    tiles = [t]
    while tiles[0].scale_exp > 0:
        tiles = [c for p in tiles for c in subdivide(p)]
    return tiles


def _check_depth(depth: int, max_depth: int) -> None:
    if not isinstance(depth, int) or depth < 0:
        raise ValueError(f"depth must be a non-negative integer, got {depth!r}")
    if depth > max_depth:
        raise CapacityError(f"depth {depth} exceeds the configured maximum {max_depth}")


def generate_patch(depth: int, max_depth: int = DEFAULT_MAX_DEPTH, workers: int = 1) -> Patch:
    """Build the depth-``depth`` patch in depth-first child order.

    With ``workers > 1`` the subtrees below the first subdivision level are
    expanded in separate processes; the concatenated result is the same list.
    """
    _check_depth(depth, max_depth)
    t = seed()
    for _ in range(depth):
        t = inflate(t)
    if workers <= 1 or depth < 3:
        return Patch(depth, tuple(_expand(t)))
    roots = [g for c in subdivide(t) for g in subdivide(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_expand, roots))
    return Patch(depth, tuple(c for part in parts for c in part))


def iter_subdivisions(depth: int, max_depth: int = DEFAULT_MAX_DEPTH
                      ) -> Iterator[tuple[PlacedTriangle, tuple[PlacedTriangle, ...]]]:
    """Yield every (parent, children) pair used to build the depth-``depth`` patch."""
    _check_depth(depth, max_depth)
    t = seed()
    for _ in range(depth):
        t = inflate(t)
    level = [t]
    for _ in range(depth):
        nxt = []
        for p in level:
            kids = subdivide(p)
            yield p, kids
            nxt.extend(kids)
        level = nxt


def control_point(t: PlacedTriangle) -> ExactPoint:
    """The point r + (s - r)/2 + (l - r)/4 = (r + 2s + l)/4 of a unit tile."""
    if t.scale_exp != 0:
        raise ValueError("control points are defined for unit tiles only")
    return ExactPoint._raw(ExactScalar.combine((1, 2, 1), (t.r.x, t.s.x, t.l.x), two=2),
                           ExactScalar.combine((1, 2, 1), (t.r.y, t.s.y, t.l.y), two=2))


@dataclass
class PartitionReport:
    ok: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _int_orient(a, b, c) -> int:
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def _separated(t1, t2) -> bool:
    # convex sets with disjoint interiors have a separating edge line
    for tri, other in ((t1, t2), (t2, t1)):
        o = _int_orient(*tri)
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            if all(_int_orient(a, b, p) * o <= 0 for p in other):
                return True
    return False


def verify_partition(parent: PlacedTriangle, children: Sequence[PlacedTriangle]) -> PartitionReport:
    """Exactly check that ``children`` tile ``parent`` as five similar triangles.

    Checks side lengths and chirality of each child, the area sum, that every
    child vertex lies in the closed parent, and that child interiors are
    pairwise disjoint.  Together these imply coverage up to a null set.
    """
    failures: list[str] = []
    if len(children) != 5:
        failures.append(f"expected 5 children, got {len(children)}")
    pts = [v for t in (parent, *children) for v in t.vertices]
    A = max(max(p.x.two_exp, p.y.two_exp) for p in pts)
    B = max(max(p.x.five_exp, p.y.five_exp) for p in pts)

    def ints(t):
        return tuple((v.x.scaled_int(A, B), v.y.scaled_int(A, B)) for v in t.vertices)

    P = ints(parent)
    po = _int_orient(*P)
    parent_area2 = abs((P[1][0] - P[0][0]) * (P[2][1] - P[0][1])
                       - (P[1][1] - P[0][1]) * (P[2][0] - P[0][0]))
    kids = []
    area2 = 0
    for i, c in enumerate(children, start=1):
        if c.scale_exp != parent.scale_exp - 1:
            failures.append(f"child {i}: scale_exp {c.scale_exp}")
        if not c.check_sides():
            failures.append(f"child {i}: side lengths are not (1, 2, sqrt 5) at its scale")
        o = orientation(c.r, c.l, c.s)
        if o == 0 or o != c.chirality:
            failures.append(f"child {i}: chirality {c.chirality} but orientation {o}")
        K = ints(c)
        kids.append(K)
        area2 += abs((K[1][0] - K[0][0]) * (K[2][1] - K[0][1])
                     - (K[1][1] - K[0][1]) * (K[2][0] - K[0][0]))
        for v in K:
            if any(_int_orient(P[j], P[(j + 1) % 3], v) * po < 0 for j in range(3)):
                failures.append(f"child {i}: vertex outside the parent")
                break
    if area2 != parent_area2:
        failures.append(f"area mismatch: children {area2} vs parent {parent_area2} (x2, scaled)")
    for i in range(len(kids)):
        for j in range(i + 1, len(kids)):
            if not _separated(kids[i], kids[j]):
                failures.append(f"children {i + 1} and {j + 1} overlap")
    return PartitionReport(not failures, failures)


def default_workers() -> int:
    """Worker count from ``PINWHEEL_WORKERS``, defaulting to 1."""
    try:
        return max(1, int(os.environ.get("PINWHEEL_WORKERS", "1")))
    except ValueError:
        return 1
