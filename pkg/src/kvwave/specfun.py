"""Real special functions used by the response formulas.

``erfc``/``erfcx`` are thin wrappers over :mod:`scipy.special`.  The
hypergeometric series are summed here by term recurrence; every function
accepts scalars or arrays and returns the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "SeriesControl",
    "ConvergenceError",
    "erfc",
    "erfcx",
    "hyp0f1_reg1",
    "hyp0f1_reg1_scaled",
    "hyp0f2",
]

# erfcx(x) ~ 2 exp(x^2) overflows below this.
_ERFCX_OVERFLOW = -math.sqrt(math.log(np.finfo(float).max / 2))


class ConvergenceError(ArithmeticError):
    """A series did not reach its tolerance within ``max_terms`` terms."""

    def __init__(self, message: str, terms_used: int):
        super().__init__(f"{message} (terms used: {terms_used})")
        self.terms_used = terms_used


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-15
    max_terms: int = 500

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_SERIES = SeriesControl()


def _unwrap(x, scalar):
    return float(x) if scalar else x


def erfc(x):
    """Complementary error function."""
    return special.erfc(x)


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)``.

    Raises OverflowError when the result exceeds the double range, which only
    happens for x below about -26.6.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < _ERFCX_OVERFLOW):
        raise OverflowError("erfcx overflows for x < %.4f" % _ERFCX_OVERFLOW)
    return special.erfcx(x)


def _check_nonneg(z):
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr >= 0)):
        raise ValueError("argument must be a non-negative real")
    return arr


def _sum_ratio_series(z, ratio, ctl, name):
    """Sum a positive series with term_{k+1} = term_k * ratio(k, z), term_0 = 1.

    Stops once the geometric bound on the remainder is below
    ``ctl.rel_tol`` times the partial sum for every element.
    """
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(ctl.max_terms):
        r = ratio(k, z)
        term = term * r
        total = total + term
        rn = ratio(k + 1, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(rn < 1, term * rn / (1 - rn), np.inf)
        if np.all((tail <= ctl.rel_tol * total) | (term == 0)):
            return total
    raise ConvergenceError(f"{name} series did not converge", ctl.max_terms)


def hyp0f1_reg1(z, ctl: SeriesControl = DEFAULT_SERIES):
    """Regularized limit function 0F1~(-; 1; z) = sum z^k / (k!)^2, z >= 0.

    Equal to the modified Bessel function I0(2 sqrt(z)).  Overflows to ``inf``
    beyond z ~ 1.2e5; use :func:`hyp0f1_reg1_scaled` there.
    """
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(_check_nonneg(z))
    out = _sum_ratio_series(arr, lambda k, x: x / ((k + 1.0) * (k + 1.0)),
                            ctl, "0F1~(;1;z)")
    return _unwrap(out[0], True) if scalar else out


# Below this z the unscaled series cannot overflow and is cheaper.
_SCALED_SWITCH = 25.0
# Beyond this z (2 sqrt(z) > 100) the large-argument expansion of I0(x) e^-x
# is exact to rounding: its truncation error is of order exp(-2x).
_ASYMPTOTIC_SWITCH = 2500.0


def _i0e_large(x, ctl):
    """I0(x) exp(-x) = (2 pi x)^-1/2 sum_k ((2k-1)!!)^2 / (k! (8x)^k), x > 100."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(ctl.max_terms):
        term = term * (2 * k + 1) ** 2 / ((k + 1) * 8.0 * x)
        total = total + term
        if np.all(term <= ctl.rel_tol * total):
            return total / np.sqrt(2 * math.pi * x)
    raise ConvergenceError("large-argument 0F1~(;1;z) expansion did not converge",
                           ctl.max_terms)


def hyp0f1_reg1_scaled(z, ctl: SeriesControl = DEFAULT_SERIES):
    """Return ``(mantissa, log_scale)`` with mantissa*exp(log_scale) = 0F1~(-;1;z).

    ``log_scale`` is always ``2*sqrt(z)``, so the mantissa equals
    ``I0(x) exp(-x)`` with ``x = 2 sqrt(z)`` and lies in ``(0, 1]``.  Moderate
    ``z`` sums the series in log space so nothing overflows; very large ``z``
    uses the large-argument expansion.
    """
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(_check_nonneg(z))
    log_scale = 2.0 * np.sqrt(arr)
    mant = np.empty_like(arr)

    small = arr <= _SCALED_SWITCH
    if np.any(small):
        zs = arr[small]
        mant[small] = hyp0f1_reg1(zs, ctl) * np.exp(-log_scale[small])
    huge = arr > _ASYMPTOTIC_SWITCH
    if np.any(huge):
        mant[huge] = _i0e_large(log_scale[huge], ctl)
    big = ~small & ~huge
    if np.any(big):
        zb = arr[big]
        ln_z = np.log(zb)
        log_term = -log_scale[big]
        total = np.exp(log_term)
        peak = np.sqrt(zb)
        for k in range(1, ctl.max_terms):
            log_term = log_term + ln_z - 2.0 * math.log(k)
            term = np.exp(log_term)
            total = total + term
            rn = zb / ((k + 1.0) * (k + 1.0))
            past_peak = k + 1 > peak
            with np.errstate(divide="ignore", invalid="ignore"):
                tail = np.where(rn < 1, term * rn / (1 - rn), np.inf)
            if np.all(past_peak & (tail <= ctl.rel_tol * total)):
                break
        else:
            raise ConvergenceError("scaled 0F1~(;1;z) series did not converge",
                                   ctl.max_terms)
        mant[big] = total
    if scalar:
        return float(mant[0]), float(log_scale[0])
    return mant, log_scale


def hyp0f2(b1: float, b2: float, z, ctl: SeriesControl = DEFAULT_SERIES):
    """Generalized hypergeometric 0F2(-; b1, b2; z) for b1, b2 > 0 and z >= 0."""
    if b1 <= 0 or b2 <= 0:
        raise ValueError("hyp0f2 requires positive lower parameters")
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(_check_nonneg(z))
    out = _sum_ratio_series(
        arr, lambda k, x: x / ((b1 + k) * (b2 + k) * (k + 1.0)), ctl, "0F2")
    return _unwrap(out[0], True) if scalar else out
