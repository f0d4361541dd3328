"""
Special functions for the beta manifold: log-gamma and the polygamma
functions ψ, ψ′, ψ″ on the positive real axis.

Every function shifts its argument above SHIFT_THRESHOLD with the upward
recurrence, then evaluates the asymptotic (Bernoulli) series. Inputs may be
Python floats or numpy arrays; scalars come back as floats.

Arguments below MIN_ARGUMENT (including zero, negatives and NaN) raise
DomainError instead of returning ±inf.
"""

from typing import Tuple, Union

import numpy as np

from app.core.errors import DomainError

ArrayLike = Union[float, np.ndarray]

SHIFT_THRESHOLD = 10.0
MIN_ARGUMENT = 1e-300
HALF_LOG_2PI = 0.91893853320467274178

# Stirling series for lnΓ: coefficients of z^-1, z^-3, ..., z^-13
_LOG_GAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# ψ(z) ~ ln z − 1/(2z) − Σ c_k z^(−2k), k = 1..7
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# ψ′(z) ~ 1/z + 1/(2z²) + Σ c_k z^(−2k−1), k = 1..7
_TRIGAMMA_SERIES = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

# ψ″(z) ~ −1/z² − 1/z³ − Σ c_k z^(−2k−2), k = 1..7
_TETRAGAMMA_SERIES = (
    1.0 / 2.0,
    -1.0 / 6.0,
    1.0 / 6.0,
    -3.0 / 10.0,
    5.0 / 6.0,
    -691.0 / 210.0,
    35.0 / 2.0,
)


def _check_domain(x: ArrayLike, name: str) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    # NaN fails the comparison, so it is rejected too
    if not np.all(arr >= MIN_ARGUMENT) or not np.all(np.isfinite(arr)):
        bad = arr[~((arr >= MIN_ARGUMENT) & np.isfinite(arr))].ravel()[0]
        raise DomainError(f"{name} requires finite arguments >= {MIN_ARGUMENT:g}, got {bad!r}")
    return arr, arr.ndim == 0


def _out(value: np.ndarray, scalar: bool) -> ArrayLike:
    return float(value) if scalar else value


def _horner(coefficients: Tuple[float, ...], w: np.ndarray) -> np.ndarray:
    """Σ c_k w^k for k = 0..len-1."""
    acc = np.zeros_like(w)
    for c in reversed(coefficients):
        acc = acc * w + c
    return acc


# ============================================================================
# LOG-GAMMA AND DIGAMMA
# ============================================================================

def _log_gamma(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    product = np.ones_like(z)
    small = z < SHIFT_THRESHOLD
    while small.any():
        product = np.where(small, product * z, product)
        z = np.where(small, z + 1.0, z)
        small = z < SHIFT_THRESHOLD

    r = 1.0 / z
    series = r * _horner(_LOG_GAMMA_SERIES, r * r)
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series - np.log(product)


def _digamma(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    acc = np.zeros_like(z)
    small = z < SHIFT_THRESHOLD
    while small.any():
        acc = np.where(small, acc - 1.0 / z, acc)
        z = np.where(small, z + 1.0, z)
        small = z < SHIFT_THRESHOLD

    r = 1.0 / z
    r2 = r * r
    return acc + np.log(z) - 0.5 * r - r2 * _horner(_DIGAMMA_SERIES, r2)


def log_gamma(x: ArrayLike) -> ArrayLike:
    """ln Γ(x) for x > 0."""
    arr, scalar = _check_domain(x, "log_gamma")
    return _out(_log_gamma(arr), scalar)


def digamma(x: ArrayLike) -> ArrayLike:
    """ψ(x) = d/dx ln Γ(x) for x > 0."""
    arr, scalar = _check_domain(x, "digamma")
    return _out(_digamma(arr), scalar)


# ============================================================================
# TRIGAMMA AND TETRAGAMMA
# ============================================================================

def _trigamma_tetragamma(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """ψ′ and ψ″ sharing one recurrence. No domain check (hot path of the geodesic ODE)."""
    z = np.array(z, dtype=float, copy=True)
    acc1 = np.zeros_like(z)
    acc2 = np.zeros_like(z)
    small = z < SHIFT_THRESHOLD
    while small.any():
        inv = 1.0 / z
        inv2 = inv * inv
        acc1 = np.where(small, acc1 + inv2, acc1)
        acc2 = np.where(small, acc2 - 2.0 * inv2 * inv, acc2)
        z = np.where(small, z + 1.0, z)
        small = z < SHIFT_THRESHOLD

    r = 1.0 / z
    r2 = r * r
    trigamma = acc1 + r + 0.5 * r2 + r2 * r * _horner(_TRIGAMMA_SERIES, r2)
    tetragamma = acc2 - r2 - r2 * r - r2 * r2 * _horner(_TETRAGAMMA_SERIES, r2)
    return trigamma, tetragamma


def trigamma(x: ArrayLike) -> ArrayLike:
    """ψ′(x) for x > 0 (always positive)."""
    arr, scalar = _check_domain(x, "trigamma")
    return _out(_trigamma_tetragamma(arr)[0], scalar)


def tetragamma(x: ArrayLike) -> ArrayLike:
    """ψ″(x) for x > 0 (always negative)."""
    arr, scalar = _check_domain(x, "tetragamma")
    return _out(_trigamma_tetragamma(arr)[1], scalar)


def polygamma_pair(x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(ψ′(x), ψ″(x)) in one pass."""
    arr, scalar = _check_domain(x, "polygamma_pair")
    d1, d2 = _trigamma_tetragamma(arr)
    return _out(d1, scalar), _out(d2, scalar)
