"""Earlier integral solutions, kept for cross-validation and timing.

``hanin_delta`` and ``morrison_step`` reproduce the delta and step responses
of :mod:`kvwave.kvcore`.  ``dozio_delta`` is implemented exactly as published
and is known to disagree with them; it is marked ``known_defect``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kvcore import DEFAULT_QUAD, DimensionlessCoord, DomainError
from .quadrature import (
    DecayHint,
    EvalOutcome,
    QuadSpec,
    integrate_finite,
    integrate_semi_infinite,
)

__all__ = [
    "LiteratureTag",
    "LiteratureMethod",
    "METHODS",
    "hanin_delta",
    "morrison_step",
    "dozio_delta",
    "MORRISON_MAX_TAU",
]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# Beyond this tau the exp(2 tau sin^2) growth in Morrison's integrand cancels
# against exp(-tau) well past what double precision can resolve reliably.
MORRISON_MAX_TAU = 8.0


class LiteratureTag(str, Enum):
    HANIN_DELTA = "HaninDelta"
    MORRISON_STEP = "MorrisonStep"
    DOZIO_DELTA = "DozioDelta"


@dataclass(frozen=True)
class LiteratureMethod:
    tag: LiteratureTag
    known_defect: bool = False

    def __post_init__(self):
        if self.tag is LiteratureTag.DOZIO_DELTA and not self.known_defect:
            raise ValueError("DozioDelta must carry known_defect=True")


METHODS = {
    LiteratureTag.HANIN_DELTA: LiteratureMethod(LiteratureTag.HANIN_DELTA),
    LiteratureTag.MORRISON_STEP: LiteratureMethod(LiteratureTag.MORRISON_STEP),
    LiteratureTag.DOZIO_DELTA: LiteratureMethod(LiteratureTag.DOZIO_DELTA, known_defect=True),
}


def _require_positive_xi(c: DimensionlessCoord):
    if not c.xi > 0:
        raise DomainError("literature formulas need xi > 0")


def _combine(parts, value, spec):
    err = sum(p.error_estimate for p in parts)
    evals = sum(p.function_evals for p in parts)
    ok = all(p.converged for p in parts) and err <= spec.tolerance(value)
    return EvalOutcome(float(value), float(err), evals, bool(ok))


def hanin_delta(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD) -> EvalOutcome:
    """Delta-pulse response as the sum of a finite and a damped semi-infinite integral.

    r = (2 xi / (pi tau)) int_0^1 exp(-2 tau u^2) cos(2u [xi - tau sqrt(1-u^2)]) du
        + (exp(-2 tau) / pi) int_0^inf exp(-tau u) [sin((2+u) xi / sqrt(1+u)) - sin(2 xi)] du
    """
    _require_positive_xi(c)
    xi, tau = c.xi, c.tau
    pre1 = 2.0 * xi / (math.pi * tau)
    pre2 = math.exp(-2.0 * tau) / math.pi
    sub = spec.scaled(0.5)

    def first(u):
        return pre1 * np.exp(-2.0 * tau * u * u) * np.cos(
            2.0 * u * (xi - tau * np.sqrt(np.maximum(1.0 - u * u, 0.0))))

    def second(u):
        return pre2 * np.exp(-tau * u) * (np.sin((2.0 + u) / np.sqrt(1.0 + u) * xi)
                                   - math.sin(2.0 * xi))

    # The bracket is bounded by 2.
    hint = DecayHint.exponential(tau, math.log(2.0 * pre2))
    p1 = integrate_finite(first, 0.0, 1.0, sub)
    p2 = integrate_semi_infinite(second, 0.0, hint, sub)
    out = _combine((p1, p2), p1.value + p2.value, spec)
    if out.converged or not (p1.converged and p2.converged):
        return out
    # The parts cancel; retry once with tolerances tightened by the measured
    # cancellation ratio.
    ratio = abs(out.value) / max(abs(p1.value), abs(p2.value), _TINY)
    tight = QuadSpec(rel_tol=max(sub.rel_tol * ratio, 4 * _EPS), abs_tol=sub.abs_tol,
                     max_subdivisions=sub.max_subdivisions,
                     tail_tol_fraction=sub.tail_tol_fraction)
    q1 = integrate_finite(first, 0.0, 1.0, tight)
    q2 = integrate_semi_infinite(second, 0.0, hint, tight)
    again = _combine((q1, q2), q1.value + q2.value, spec)
    return EvalOutcome(again.value, again.error_estimate,
                       out.function_evals + again.function_evals, again.converged)


def morrison_step(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD,
                  max_tau: float = MORRISON_MAX_TAU) -> EvalOutcome:
    """Step-pulse response from the single finite integral over (0, tau).

    Evaluated after ``u = tau sin^2(theta)``, which removes both inverse
    square-root endpoint singularities:

        r = (2/pi) int_0^{pi/2} exp(-tau cos 2theta) cos(tau sin 2theta)
                                exp(-xi^2 / (4 tau sin^2 theta)) dtheta

    For ``tau > max_tau`` the call is refused with a non-converged outcome.
    Otherwise a rounding bound ``eps * int |integrand|`` is added to the
    error, so cancellation that swamps the tolerance is also reported as
    non-convergence rather than returned as a value.
    """
    _require_positive_xi(c)
    xi, tau = c.xi, c.tau
    if tau > max_tau:
        return EvalOutcome(math.nan, math.inf, 0, False)
    q = xi * xi / (4.0 * tau)

    def integrand(theta):
        s2 = np.sin(theta) ** 2
        with np.errstate(divide="ignore"):
            expo = -tau * np.cos(2.0 * theta) - q / s2
        return (2.0 / math.pi) * np.cos(tau * np.sin(2.0 * theta)) * np.exp(expo)

    res = integrate_finite(integrand, 0.0, 0.5 * math.pi, spec)
    mag = integrate_finite(lambda th: np.abs(integrand(th)), 0.0, 0.5 * math.pi,
                           QuadSpec(rel_tol=1e-3, abs_tol=0.0))
    rounding = 10.0 * _EPS * mag.value * math.sqrt(res.function_evals)
    err = float(res.error_estimate + rounding)
    ok = bool(res.converged and err <= spec.tolerance(res.value))
    return EvalOutcome(res.value, err, res.function_evals + mag.function_evals, ok)


def dozio_delta(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD) -> EvalOutcome:
    """Dozio's delta-pulse formula as printed (known to be defective).

    r = exp(-tau) [xi^2/2 + (2/pi) int_0^inf u exp(-tau u^2) sin(xi (1/u + u)) du]

    The integral is split at u = 1.  On (0, 1] the substitution w = 1/u gives
    int_1^inf w^-3 exp(-tau/w^2) sin(xi (w + 1/w)) dw, whose slowly decaying
    oscillation is removed by moving to the path w = 1 + iy (the integrand is
    analytic there and the closing arc vanishes):

        int_1^inf ... dw = Re int_0^inf G(1 + iy) dy,
        G(w) = w^-3 exp(-tau/w^2 + i xi (w + 1/w)),  |G(1+iy)| <= exp(xi/2 + tau/8 - xi y).
    """
    _require_positive_xi(c)
    xi, tau = c.xi, c.tau
    sub = spec.scaled(0.5)

    def near(y):
        w = 1.0 + 1j * y
        return np.real(w ** -3 * np.exp(-tau / (w * w) + 1j * xi * (w + 1.0 / w)))

    log_amp = xi / 2.0 + tau / 8.0

    def near_tail(v):
        # Both exp(-xi y) and |w|^-3 <= y^-3 bound the modulus; take the better.
        exp_bound = log_amp - xi * v - math.log(xi)
        pow_bound = log_amp - math.log(2.0) - 2.0 * math.log(max(v, 1e-300))
        return min(exp_bound, pow_bound)

    p1 = integrate_semi_infinite(near, 0.0, DecayHint(near_tail, 0.0), sub)

    def far(u):
        return u * np.exp(-tau * u * u) * np.sin(xi * (1.0 / u + u))

    def far_coeffs(v0):
        # u <= exp(ln v0 + (u - v0)/v0)
        return tau, 1.0 / v0, math.log(v0) - 1.0

    p2 = integrate_semi_infinite(far, 1.0, DecayHint.gaussian(far_coeffs, 1.0), sub)
    pref = math.exp(-tau)
    value = pref * (0.5 * xi * xi + 2.0 / math.pi * (p1.value + p2.value))
    scaled = [p.scaled(2.0 / math.pi * pref) for p in (p1, p2)]
    return _combine(scaled, value, spec)
