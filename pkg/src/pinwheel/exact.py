"""Exact arithmetic in the ring of rationals with denominators 2^a * 5^b.

Every coordinate that shows up in a pinwheel patch (vertices, control points,
squared distances) lives in this ring, so geometry is done here without any
rounding.  Values are immutable; all operations are pure.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import NamedTuple, Sequence

__all__ = [
    "ExactScalar",
    "ExactPoint",
    "DistanceKey",
    "GaussianValuation",
    "normalize",
    "as_scalar",
    "squared_distance",
    "gaussian_valuations",
    "rotate_theta",
    "rotation_membership",
    "orientation",
    "point_in_triangle",
]

_POW5 = [5**k for k in range(128)]


def _pow5(k: int) -> int:
    return _POW5[k] if k < 128 else 5**k


def _reduce(num: int, two_exp: int, five_exp: int) -> tuple[int, int, int]:
    if num == 0:
        return 0, 0, 0
    if two_exp and not num & 1:
        k = min(two_exp, (num & -num).bit_length() - 1)
        num >>= k
        two_exp -= k
    while five_exp and num % 5 == 0:
        num //= 5
        five_exp -= 1
    return num, two_exp, five_exp


def _split_25(n: int) -> tuple[int, int, int]:
    """Return (rest, a, b) with n = rest * 2^a * 5^b and gcd(rest, 10) = 1."""
    if n == 0:
        raise ZeroDivisionError("zero has no 2/5 decomposition")
    a = (n & -n).bit_length() - 1
    n >>= a
    b = 0
    while n % 5 == 0:
        n //= 5
        b += 1
    return n, a, b


class ExactScalar:
    """The rational number ``num / (2**two_exp * 5**five_exp)`` in lowest terms."""

    __slots__ = ("num", "two_exp", "five_exp")

    def __init__(self, num: int = 0, two_exp: int = 0, five_exp: int = 0):
        num = operator.index(num)
        if two_exp < 0 or five_exp < 0:
            raise ValueError("exponents must be non-negative")
        self.num, self.two_exp, self.five_exp = _reduce(num, two_exp, five_exp)

    @classmethod
    def _raw(cls, num: int, two_exp: int, five_exp: int) -> "ExactScalar":
        obj = object.__new__(cls)
        obj.num = num
        obj.two_exp = two_exp
        obj.five_exp = five_exp
        return obj

    @classmethod
    def _reduced(cls, num: int, two_exp: int, five_exp: int) -> "ExactScalar":
        return cls._raw(*_reduce(num, two_exp, five_exp))

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> "ExactScalar":
        value = Fraction(value)
        rest, a, b = _split_25(value.denominator)
        if rest != 1:
            raise ValueError(f"{value} has a denominator outside 2^a*5^b")
        return cls._raw(value.numerator, a, b)

    @classmethod
    def from_token(cls, token: str) -> "ExactScalar":
        """Parse the ``n:a:b`` text form."""
        try:
            n, a, b = token.strip().split(":")
            return cls(int(n), int(a), int(b))
        except ValueError as exc:
            raise ValueError(f"malformed scalar token {token!r}") from exc

    def token(self) -> str:
        return f"{self.num}:{self.two_exp}:{self.five_exp}"

    @property
    def denominator(self) -> int:
        return (1 << self.two_exp) * _pow5(self.five_exp)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.denominator)

    def scaled_int(self, two_exp: int, five_exp: int) -> int:
        """Numerator over the common denominator 2^two_exp * 5^five_exp."""
        if two_exp < self.two_exp or five_exp < self.five_exp:
            raise ValueError("target denominator does not divide out this value")
        return (self.num << (two_exp - self.two_exp)) * _pow5(five_exp - self.five_exp)

    def div_pow(self, two: int = 0, five: int = 0) -> "ExactScalar":
        """Divide by 2^two * 5^five."""
        if two < 0 or five < 0:
            raise ValueError("exponents must be non-negative")
        return ExactScalar._reduced(self.num, self.two_exp + two, self.five_exp + five)

    @staticmethod
    def combine(weights: Sequence[int], values: Sequence["ExactScalar"],
                two: int = 0, five: int = 0) -> "ExactScalar":
        """Integer combination ``sum(w * v) / (2^two * 5^five)`` with one reduction."""
        A = max(v.two_exp for v in values)
        B = max(v.five_exp for v in values)
        n = 0
        for w, v in zip(weights, values):
            if w:
                n += w * ((v.num << (A - v.two_exp)) * _pow5(B - v.five_exp))
        return ExactScalar._reduced(n, A + two, B + five)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        A = max(self.two_exp, o.two_exp)
        B = max(self.five_exp, o.five_exp)
        n = ((self.num << (A - self.two_exp)) * _pow5(B - self.five_exp)
             + (o.num << (A - o.two_exp)) * _pow5(B - o.five_exp))
        return ExactScalar._reduced(n, A, B)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw(-self.num, self.two_exp, self.five_exp)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.num < 0 else self

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ExactScalar._reduced(self.num * o.num, self.two_exp + o.two_exp,
                                    self.five_exp + o.five_exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num == 0:
            raise ZeroDivisionError("division by zero")
        rest, a, b = _split_25(abs(o.num))
        if rest != 1:
            raise ValueError(f"division by {o} leaves the 2^a*5^b ring")
        sign = -1 if o.num < 0 else 1
        # self / (2^a 5^b / (2^A 5^B)) = self * 2^A 5^B / (2^a 5^b)
        num = sign * (self.num << o.two_exp) * _pow5(o.five_exp)
        return ExactScalar._reduced(num, self.two_exp + a, self.five_exp + b)

    # comparison ---------------------------------------------------------------

    def _key(self):
        return self.num, self.two_exp, self.five_exp

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._key() == o._key()

    def __hash__(self):
        if self.two_exp == 0 and self.five_exp == 0:
            return hash(self.num)
        return hash(self._key())

    def _cmp(self, other) -> int:
        o = _coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare ExactScalar with {type(other).__name__}")
        d = (self - o).num
        return (d > 0) - (d < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    @property
    def sign(self) -> int:
        return (self.num > 0) - (self.num < 0)

    def is_integer(self) -> bool:
        return self.two_exp == 0 and self.five_exp == 0

    def __bool__(self):
        return self.num != 0

    def __float__(self):
        if self.two_exp == 0 and self.five_exp == 0:
            return float(self.num)
        return float(self.as_fraction())

    def __repr__(self):
        return f"ExactScalar({self.num}, {self.two_exp}, {self.five_exp})"

    def __str__(self):
        return str(self.as_fraction())

    def __reduce__(self):
        return (ExactScalar._raw, self._key())


_ZERO = ExactScalar._raw(0, 0, 0)


def _coerce(v):
    if isinstance(v, ExactScalar):
        return v
    if isinstance(v, int):
        return ExactScalar._raw(int(v), 0, 0)
    if isinstance(v, Fraction):
        return ExactScalar.from_fraction(v)
    return NotImplemented


def as_scalar(v) -> ExactScalar:
    """Coerce an int, Fraction, ``n/d`` string or ExactScalar to an ExactScalar."""
    if isinstance(v, str):
        v = Fraction(v)
    o = _coerce(v)
    if o is NotImplemented:
        raise TypeError(f"cannot represent {v!r} exactly")
    return o


def normalize(num: int, two_exp: int, five_exp: int) -> ExactScalar:
    """Lowest-terms representative of ``num / (2^two_exp * 5^five_exp)``."""
    return ExactScalar(num, two_exp, five_exp)


class ExactPoint:
    """A planar point with ExactScalar coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = as_scalar(x)
        self.y = as_scalar(y)

    @classmethod
    def _raw(cls, x: ExactScalar, y: ExactScalar) -> "ExactPoint":
        obj = object.__new__(cls)
        obj.x = x
        obj.y = y
        return obj

    @classmethod
    def from_token(cls, token: str) -> "ExactPoint":
        try:
            xs, ys = token.strip().split(";")
        except ValueError as exc:
            raise ValueError(f"malformed point token {token!r}") from exc
        return cls._raw(ExactScalar.from_token(xs), ExactScalar.from_token(ys))

    def token(self) -> str:
        return f"{self.x.token()};{self.y.token()}"

    def __add__(self, other: "ExactPoint") -> "ExactPoint":
        return ExactPoint._raw(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "ExactPoint") -> "ExactPoint":
        return ExactPoint._raw(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "ExactPoint":
        return ExactPoint._raw(-self.x, -self.y)

    def __mul__(self, k) -> "ExactPoint":
        return ExactPoint._raw(self.x * k, self.y * k)

    __rmul__ = __mul__

    def div_pow(self, two: int = 0, five: int = 0) -> "ExactPoint":
        return ExactPoint._raw(self.x.div_pow(two, five), self.y.div_pow(two, five))

    def norm_sq(self) -> ExactScalar:
        return self.x * self.x + self.y * self.y

    def cross(self, other: "ExactPoint") -> ExactScalar:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "ExactPoint") -> ExactScalar:
        return self.x * other.x + self.y * other.y

    def __eq__(self, other):
        if not isinstance(other, ExactPoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"ExactPoint({self.x}, {self.y})"

    def __reduce__(self):
        return (ExactPoint._raw, (self.x, self.y))

    def to_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)


@total_ordering
@dataclass(frozen=True, slots=True)
class DistanceKey:
    """Reduced squared distance ``s / (5^ell * 4^residual_two_exp)``.

    ``DistanceKey(0, 0, 0)`` is the zero sentinel (a point paired with itself).
    """

    s: int
    ell: int = 0
    residual_two_exp: int = 0

    @classmethod
    def from_scalar(cls, value: ExactScalar) -> "DistanceKey":
        if value.num < 0:
            raise ValueError("squared distance cannot be negative")
        if value.num == 0:
            return ZERO_KEY
        t = (value.two_exp + 1) // 2
        return cls(value.num << (2 * t - value.two_exp), value.five_exp, t)

    @classmethod
    def from_value(cls, value) -> "DistanceKey":
        """Build a key from anything :func:`as_scalar` accepts (or a key)."""
        if isinstance(value, DistanceKey):
            return value
        return cls.from_scalar(as_scalar(value))

    @property
    def value(self) -> Fraction:
        return Fraction(self.s, _pow5(self.ell) << (2 * self.residual_two_exp))

    @property
    def r(self) -> float:
        return math.sqrt(self.value)

    def __lt__(self, other):
        if not isinstance(other, DistanceKey):
            return NotImplemented
        lhs = (self.s << (2 * other.residual_two_exp)) * _pow5(other.ell)
        rhs = (other.s << (2 * self.residual_two_exp)) * _pow5(self.ell)
        return lhs < rhs

    def __str__(self):
        return str(self.value)


ZERO_KEY = DistanceKey(0, 0, 0)


def squared_distance(p: ExactPoint, q: ExactPoint) -> DistanceKey:
    dx = p.x - q.x
    dy = p.y - q.y
    return DistanceKey.from_scalar(dx * dx + dy * dy)


class GaussianValuation(NamedTuple):
    """Signed valuations of a point, read as a complex number, at 2+i and 2-i."""

    v_plus: int
    v_minus: int


def _common_integers(p: ExactPoint) -> tuple[int, int, int, int]:
    A = max(p.x.two_exp, p.y.two_exp)
    B = max(p.x.five_exp, p.y.five_exp)
    return p.x.scaled_int(A, B), p.y.scaled_int(A, B), A, B


def _gaussian_valuation(X: int, Y: int, conj: bool) -> int:
    # (X + iY) / (2 + i) = ((2X + Y) + i(2Y - X)) / 5 ; conj swaps to 2 - i
    v = 0
    while True:
        if conj:
            re, im = 2 * X - Y, X + 2 * Y
        else:
            re, im = 2 * X + Y, 2 * Y - X
        if re % 5 or im % 5:
            return v
        X, Y = re // 5, im // 5
        v += 1


def gaussian_valuations(p: ExactPoint) -> GaussianValuation:
    """Valuations of ``x + iy`` at the Gaussian primes 2+i and 2-i.

    The factor 5^B of the denominator splits as (2+i)^B (2-i)^B; powers of 2
    are coprime to both primes.
    """
    X, Y, _, B = _common_integers(p)
    if X == 0 and Y == 0:
        raise ValueError("the origin has no Gaussian valuation")
    return GaussianValuation(_gaussian_valuation(X, Y, False) - B,
                             _gaussian_valuation(X, Y, True) - B)


def rotate_theta(p: ExactPoint, n: int) -> ExactPoint:
    """Apply R_theta^n exactly, R_theta = [[3, -4], [4, 3]] / 5."""
    x, y = p.x, p.y
    if n >= 0:
        for _ in range(n):
            x, y = (ExactScalar.combine((3, -4), (x, y), five=1),
                    ExactScalar.combine((4, 3), (x, y), five=1))
    else:
        for _ in range(-n):
            x, y = (ExactScalar.combine((3, 4), (x, y), five=1),
                    ExactScalar.combine((-4, 3), (x, y), five=1))
    return ExactPoint._raw(x, y)


def _is_lattice_point(p: ExactPoint) -> bool:
    return p.x.is_integer() and p.y.is_integer()


def rotation_membership(p: ExactPoint) -> tuple[int, int] | None:
    """All n with ``p`` in R_{n theta} Z^2, as an inclusive interval, or None.

    The interval ``[-v_minus, v_plus]`` comes from the Gaussian valuations and
    is then confirmed point by point by exact matrix application, including
    the two integers just outside it.
    """
    v = gaussian_valuations(p)
    if p.x.two_exp or p.y.two_exp:
        return None
    lo, hi = -v.v_minus, v.v_plus
    if lo > hi:
        return None
    q = rotate_theta(p, -(lo - 1))
    if _is_lattice_point(q):
        raise ArithmeticError(f"valuation interval for {p} misses n={lo - 1}")
    q = rotate_theta(q, -1)
    for n in range(lo, hi + 1):
        if not _is_lattice_point(q):
            raise ArithmeticError(f"R^-{n} {p} is not a lattice point")
        q = rotate_theta(q, -1)
    if _is_lattice_point(q):
        raise ArithmeticError(f"valuation interval for {p} misses n={hi + 1}")
    return lo, hi


def orientation(a: ExactPoint, b: ExactPoint, c: ExactPoint) -> int:
    """Sign of (b - a) x (c - a)."""
    return ((b - a).cross(c - a)).sign


def point_in_triangle(p: ExactPoint, t: Sequence[ExactPoint]) -> str:
    """Classify ``p`` as ``"inside"``, ``"boundary"`` or ``"outside"`` of triangle ``t``."""
    a, b, c = t
    o = orientation(a, b, c)
    if o == 0:
        raise ValueError("degenerate triangle")
    signs = (orientation(a, b, p) * o, orientation(b, c, p) * o, orientation(c, a, p) * o)
    if min(signs) < 0:
        return "outside"
    if min(signs) == 0:
        return "boundary"
    return "inside"
