"""Adaptive Gauss-Kronrod integration on finite and semi-infinite intervals.

Integrands are vectorized: they receive a 1-D ``numpy`` array of abscissae
and must return an array of the same shape.  Every routine returns an
:class:`EvalOutcome`; running out of subdivisions yields ``converged=False``
rather than an exception, so callers can decide how to report it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "QuadSpec",
    "EvalOutcome",
    "DecayHint",
    "ConfigurationError",
    "integrate_finite",
    "integrate_semi_infinite",
]

Integrand = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208067221300,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full symmetric rule on [-1, 1].
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(21)
_gauss_pos = np.zeros(11)
_gauss_pos[1:10:2] = _WG[:5]
_GAUSS_W[:10] = _gauss_pos[:-1]
_GAUSS_W[10:] = _gauss_pos[::-1]
del _gauss_pos
RULE_POINTS = 21


class ConfigurationError(ValueError):
    """Raised when a quadrature request cannot be set up (e.g. no usable tail bound)."""


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budget for one quadrature request.

    ``tail_tol_fraction`` is the share of the error budget that semi-infinite
    integrals may spend on the discarded tail.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_tol_fraction: float = 0.1

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol >= 0:
            raise ValueError("need rel_tol > 0 and abs_tol >= 0")
        if self.rel_tol < _EPS and self.abs_tol < _TINY:
            raise ValueError("rel_tol and abs_tol are both effectively zero")
        if not 0 < self.tail_tol_fraction < 1:
            raise ValueError("tail_tol_fraction must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def scaled(self, factor: float) -> "QuadSpec":
        return QuadSpec(
            rel_tol=self.rel_tol * factor,
            abs_tol=self.abs_tol * factor,
            max_subdivisions=self.max_subdivisions,
            tail_tol_fraction=self.tail_tol_fraction,
        )


@dataclass(frozen=True)
class EvalOutcome:
    value: float
    error_estimate: float
    function_evals: int
    converged: bool

    def __post_init__(self):
        if not self.error_estimate >= 0 and not math.isnan(self.error_estimate):
            raise ValueError("error_estimate must be non-negative")

    def scaled(self, factor: float) -> "EvalOutcome":
        return EvalOutcome(
            self.value * factor,
            self.error_estimate * abs(factor),
            self.function_evals,
            self.converged,
        )


def _gaussian_log_tail(alpha: float, beta: float, gamma: float, v: float) -> float:
    """ln of the integral of exp(-alpha*x**2 + beta*x + gamma) over [v, inf)."""
    if alpha > 0:
        sa = math.sqrt(alpha)
        u = sa * (v - beta / (2 * alpha))
        if u >= 0:
            log_erfc = math.log(special.erfcx(u)) - u * u
        else:
            log_erfc = math.log(special.erfc(u))
        return (gamma + beta * beta / (4 * alpha)
                + math.log(math.sqrt(math.pi) / (2 * sa)) + log_erfc)
    if alpha == 0 and beta < 0:
        return gamma + beta * v - math.log(-beta)
    raise ConfigurationError("envelope exp(-a v^2 + b v + c) is not integrable")


@dataclass(frozen=True)
class DecayHint:
    """Certified bound on the tail of a semi-infinite integrand.

    ``log_tail(V)`` must return ln of an upper bound for the integral of
    ``|f|`` over ``[V, inf)``, for every ``V >= start``, and must be
    non-increasing in ``V``.
    """

    log_tail: Callable[[float], float]
    start: float = 0.0

    @classmethod
    def gaussian(cls, coeffs: Callable[[float], tuple[float, float, float]],
                 start: float = 0.0) -> "DecayHint":
        """Envelope whose exponent is bounded, beyond ``V``, by ``-a v^2 + b v + c``.

        ``coeffs(V)`` returns ``(a, b, c)`` valid on ``[V, inf)``; letting the
        linear part depend on ``V`` allows tangent-line bounds of concave terms.
        """
        def log_tail(v):
            return _gaussian_log_tail(*coeffs(v), v)
        return cls(log_tail, start)

    @classmethod
    def exponential(cls, rate: float, log_scale: float = 0.0,
                    start: float = 0.0) -> "DecayHint":
        """|f(v)| <= exp(log_scale - rate * v)."""
        if rate <= 0:
            raise ConfigurationError("exponential envelope needs a positive rate")
        return cls(lambda v: log_scale - rate * v - math.log(rate), start)

    @classmethod
    def power(cls, exponent: float, log_scale: float = 0.0,
              start: float = 1.0) -> "DecayHint":
        """|f(v)| <= exp(log_scale) * v**(-exponent), exponent > 1, start > 0."""
        if exponent <= 1 or start <= 0:
            raise ConfigurationError("power envelope needs exponent > 1 and start > 0")
        p = exponent - 1
        return cls(lambda v: log_scale - p * math.log(v) - math.log(p), start)

    def truncation_point(self, a: float, budget: float) -> float:
        """Smallest (up to bisection resolution) V >= max(a, start) whose tail is within budget."""
        if budget <= 0:
            raise ConfigurationError("tail budget must be positive")
        target = math.log(budget)
        lo = max(a, self.start)
        if self._log_tail(lo) <= target:
            return lo
        step = max(1.0, abs(lo))
        hi = lo + step
        for _ in range(1100):
            if self._log_tail(hi) <= target:
                break
            lo, step = hi, 2 * step
            hi = lo + step
            if not math.isfinite(hi):
                break
        else:
            hi = math.inf
        if not math.isfinite(hi):
            raise ConfigurationError("no truncation point found for the requested tail budget")
        while hi - lo > 1e-6 * max(1.0, abs(hi)):
            mid = 0.5 * (lo + hi)
            if self._log_tail(mid) <= target:
                hi = mid
            else:
                lo = mid
        return hi

    def _log_tail(self, v: float) -> float:
        val = self.log_tail(v)
        if math.isnan(val):
            raise ConfigurationError(f"tail bound undefined at v={v}")
        return val


def _kronrod(f: Integrand, lefts: np.ndarray, rights: np.ndarray):
    """Apply the 21-point pair to several intervals with a single integrand call."""
    centers = 0.5 * (lefts + rights)
    half = 0.5 * (rights - lefts)
    x = centers[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = fx @ _KRONROD_W
    g = fx @ _GAUSS_W
    mean = 0.5 * k
    resabs = np.abs(fx) @ _KRONROD_W
    resasc = np.abs(fx - mean[:, None]) @ _KRONROD_W
    err = np.abs((k - g) * half)
    resabs = resabs * np.abs(half)
    resasc = resasc * np.abs(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return k * half, err, resabs


def integrate_finite(f: Integrand, a: float, b: float,
                     spec: QuadSpec = QuadSpec(),
                     breakpoints: Sequence[float] = ()) -> EvalOutcome:
    """Globally adaptive 21-point Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    The interval with the largest local error is bisected until the summed
    error estimate meets ``spec``.  Nodes never touch the endpoints, so
    integrable endpoint singularities are tolerated.  ``breakpoints`` inside
    ``(a, b)`` seed the initial partition (kinks, known peaks).
    """
    if not a <= b:
        raise ValueError(f"integrate_finite needs a <= b, got [{a}, {b}]")
    if a == b:
        return EvalOutcome(0.0, 0.0, 0, True)
    cuts = sorted({float(p) for p in breakpoints if a < p < b})
    edges = np.array([a, *cuts, b], dtype=float)
    lefts, rights = edges[:-1].copy(), edges[1:].copy()
    vals, errs, _ = _kronrod(f, lefts, rights)
    nevals = RULE_POINTS * len(lefts)
    frozen = np.zeros(len(lefts), dtype=bool)

    while True:
        total = float(np.sum(vals))
        err_total = float(np.sum(errs))
        if not (math.isfinite(total) and math.isfinite(err_total)):
            return EvalOutcome(math.nan, math.inf, nevals, False)
        if err_total <= spec.tolerance(total):
            return EvalOutcome(total, err_total, nevals, True)
        if len(lefts) >= spec.max_subdivisions:
            return EvalOutcome(total, err_total, nevals, False)
        candidates = np.where(frozen, -1.0, errs)
        i = int(np.argmax(candidates))
        if candidates[i] < 0:
            return EvalOutcome(total, err_total, nevals, False)
        lo, hi = lefts[i], rights[i]
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or (hi - lo) <= 100 * _EPS * max(abs(lo), abs(hi)):
            # Interval at floating-point resolution; further bisection is noise.
            frozen[i] = True
            continue
        v2, e2, _ = _kronrod(f, np.array([lo, mid]), np.array([mid, hi]))
        nevals += 2 * RULE_POINTS
        lefts[i], rights[i], vals[i], errs[i] = lo, mid, v2[0], e2[0]
        lefts = np.append(lefts, mid)
        rights = np.append(rights, hi)
        vals = np.append(vals, v2[1])
        errs = np.append(errs, e2[1])
        frozen = np.append(frozen, False)


def integrate_semi_infinite(f: Integrand, a: float, decay: DecayHint,
                            spec: QuadSpec = QuadSpec(),
                            breakpoints: Sequence[float] = ()) -> EvalOutcome:
    """Integrate ``f`` over ``[a, inf)`` by certified truncation.

    The truncation point ``V`` is chosen so that the envelope tail is at most
    ``tail_tol_fraction`` of the tolerance; ``[a, V]`` then goes to
    :func:`integrate_finite` with the remaining budget.  The reported error
    includes the tail bound.
    """
    frac = spec.tail_tol_fraction
    inner = spec.scaled(1.0 - frac)
    # The envelope's total mass bounds |value|, so it sets the first budget;
    # the range is widened below once the value itself is known.
    log_mass = decay._log_tail(max(a, decay.start))
    budget = frac * max(spec.abs_tol, spec.rel_tol * math.exp(min(log_mass, 700.0)))
    if not budget > 0:
        # Pure relative tolerance on an integral below the double range.
        return EvalOutcome(0.0, _TINY, 0, False)
    upper = decay.truncation_point(a, budget)
    value, err, nevals, ok = 0.0, 0.0, 0, True
    lower = a
    for _ in range(8):
        if upper > lower:
            part = integrate_finite(f, lower, upper, inner,
                                    [p for p in breakpoints if lower < p < upper])
            value += part.value
            err += part.error_estimate
            nevals += part.function_evals
            ok = ok and part.converged
        tail = math.exp(decay._log_tail(max(upper, decay.start)))
        wanted = frac * spec.tolerance(value)
        if tail <= wanted or not math.isfinite(value) or not wanted > 0:
            break
        lower, upper = upper, decay.truncation_point(upper, wanted)
    else:
        ok = False
    total_err = err + tail
    ok = ok and total_err <= spec.tolerance(value)
    return EvalOutcome(value, total_err, nevals, ok)
