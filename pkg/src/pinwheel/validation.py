"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Real

import numpy as np

from .exact import DistanceKey

WINDOWS = ("full", "eroded")
TAPERS = ("none", "bartlett", "gaussian")


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name: str, minimum: float | None = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (Real, np.floating, np.integer)):
        raise TypeError(f"{name} must be a real number")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    if minimum is not None:
        if strict and not value > minimum:
            raise ValueError(f"{name} must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_window(window: str, margin) -> tuple[str, Fraction]:
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")
    margin = check_real(margin, "margin", minimum=0.0)
    return window, Fraction(margin)


def check_taper(taper: str, sigma) -> str:
    if taper not in TAPERS:
        raise ValueError(f"taper must be one of {TAPERS}, got {taper!r}")
    if taper == "gaussian":
        if sigma is None:
            raise ValueError("the gaussian taper needs sigma")
        check_real(sigma, "sigma", minimum=0.0, strict=True)
    return taper


def check_r_max_sq(value) -> DistanceKey:
    """Accept a DistanceKey, int, Fraction or ``"p/q"`` string with a 2^a 5^b denominator."""
    try:
        key = DistanceKey.from_value(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"r_max_sq {value!r} is not an exact 2^a*5^b rational") from exc
    if key.s <= 0:
        raise ValueError("r_max_sq must be positive")
    return key


def check_k_grid(k_grid, k_max: float = 16.0) -> np.ndarray:
    k = np.asarray(k_grid, dtype=float)
    if k.ndim != 1 or k.size == 0:
        raise ValueError("k_grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(k)):
        raise ValueError("k_grid must be finite")
    if k[0] < 0 or k[-1] > k_max:
        raise ValueError(f"k_grid must lie within [0, {k_max}]")
    if k.size > 1 and not np.all(np.diff(k) > 0):
        raise ValueError("k_grid must be strictly increasing")
    return k


def make_k_grid(k_min: float, k_max: float, k_step: float) -> np.ndarray:
    """Grid ``k_min + i * k_step`` up to ``k_max`` inclusive (integer-indexed, no drift)."""
    check_real(k_step, "k_step", minimum=0.0, strict=True)
    n = int(math.floor((k_max - k_min) / k_step + 1e-9))
    if n < 0:
        raise ValueError("k_max must be >= k_min")
    return k_min + np.arange(n + 1) * k_step
