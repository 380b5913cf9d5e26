"""Transient response of a semi-infinite Kelvin-Voigt medium.

All formulas work in the dimensionless coordinates

    xi  = x / (c' t_eps),   tau = t / t_eps,   c' = sqrt(Ge / rho).

The kernels are

    f(xi, tau) = 1/sqrt(pi tau) * int_xi^inf exp(-v^2/4tau) I(v) dv
    g(xi, tau) = 1/(4 sqrt(pi) tau^(5/2)) * int_xi^inf (v^2 - 2 tau) exp(-v^2/4tau) I(v) dv

with ``I(v) = 0F1~(-; 1; xi (v - xi))``.  The step response uses the
erfc-bracket integrand and the delta response is ``exp(-tau) g``.  Each
integrand is assembled as ``mantissa * exp(exponent)`` with the Gaussian,
the exponential growth ``2 sqrt(xi (v - xi))`` of ``I`` and any prefactors
summed in the exponent first, so nothing overflows for large xi or v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import specfun
from .quadrature import (
    DecayHint,
    EvalOutcome,
    QuadSpec,
    integrate_finite,
    integrate_semi_infinite,
)
from .specfun import DEFAULT_SERIES, SeriesControl

__all__ = [
    "MaterialParams",
    "DimensionlessCoord",
    "PulseKind",
    "PulseSignal",
    "DomainError",
    "DEFAULT_QUAD",
    "to_dimensionless",
    "kernel_f",
    "kernel_g",
    "step_response",
    "delta_response",
    "general_response",
    "normalization",
    "step_asym_small_tau",
    "step_asym_large_tau",
    "step_asym_small_xi",
    "delta_asym_small_tau",
    "delta_asym_large_tau",
    "delta_asym_small_xi",
]

DEFAULT_QUAD = QuadSpec(rel_tol=1e-10, abs_tol=1e-12, max_subdivisions=200,
                        tail_tol_fraction=0.1)

_SQRT_PI = math.sqrt(math.pi)


class DomainError(ValueError):
    """Input outside the domain of a response formula."""


@dataclass(frozen=True)
class MaterialParams:
    """Density (kg/m^3), equilibrium modulus (Pa) and retardation time (s)."""

    rho: float
    Ge: float
    t_eps: float

    def __post_init__(self):
        for name in ("rho", "Ge", "t_eps"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise DomainError(f"{name} must be positive and finite, got {val}")

    @property
    def c_prime(self) -> float:
        return math.sqrt(self.Ge / self.rho)


UNIT_MATERIAL = MaterialParams(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class DimensionlessCoord:
    xi: float
    tau: float

    def __post_init__(self):
        if not (self.xi >= 0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be finite and >= 0, got {self.xi}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be finite and > 0, got {self.tau}")


class PulseKind(str, Enum):
    STEP = "step"
    DELTA = "delta"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class PulseSignal:
    """Boundary excitation r0(t).

    For ``SAMPLED`` pulses, ``samples`` holds ``(t, r0)`` pairs with ``t`` in
    seconds, strictly increasing from ``t >= 0``; values in between are
    interpolated linearly.
    """

    kind: PulseKind
    samples: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        if self.kind is PulseKind.SAMPLED:
            pts = tuple((float(t), float(r)) for t, r in self.samples)
            if len(pts) < 2:
                raise DomainError("a sampled pulse needs at least two samples")
            times = [t for t, _ in pts]
            if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
                raise DomainError("sample times must be >= 0 and strictly increasing")
            object.__setattr__(self, "samples", pts)

    @classmethod
    def step(cls) -> "PulseSignal":
        return cls(PulseKind.STEP)

    @classmethod
    def delta(cls) -> "PulseSignal":
        return cls(PulseKind.DELTA)

    @classmethod
    def sampled(cls, samples: Sequence[tuple[float, float]]) -> "PulseSignal":
        return cls(PulseKind.SAMPLED, tuple(samples))

    def __call__(self, t):
        """Evaluate r0 at time(s) ``t`` (seconds).  Not defined for delta pulses."""
        if self.kind is PulseKind.STEP:
            return np.where(np.asarray(t) >= 0, 1.0, 0.0)
        if self.kind is PulseKind.SAMPLED:
            ts, rs = zip(*self.samples)
            return np.interp(t, ts, rs)
        raise DomainError("a delta pulse has no pointwise values")


def to_dimensionless(x: float, t: float, p: MaterialParams) -> DimensionlessCoord:
    if x < 0 or not t > 0:
        raise DomainError("need x >= 0 and t > 0")
    return DimensionlessCoord(x / (p.c_prime * p.t_eps), t / p.t_eps)


# --------------------------------------------------------------------------
# integrand assembly

def _bessel_part(xi: float, v: np.ndarray, ctl: SeriesControl):
    """(mantissa, log_scale) of 0F1~(-;1;xi (v - xi)), with v < xi clipped to 0."""
    z = np.maximum(xi * (v - xi), 0.0)
    return specfun.hyp0f1_reg1_scaled(z, ctl)


def _growth_coeffs(xi: float, v0: float):
    """Linear bound b v + c >= 2 sqrt(xi v) on [v0, inf) from the tangent at v0."""
    if xi == 0:
        return 0.0, 0.0
    return math.sqrt(xi / v0), math.sqrt(xi * v0)


def _tail_start(xi: float, floor: float) -> float:
    return max(xi, floor, 1e-300)


def _kernel_f_outcome(xi, tau, spec, ctl, log_factor=0.0):
    log_pref = log_factor - 0.5 * math.log(math.pi * tau)
    inv4t = 1.0 / (4.0 * tau)

    def integrand(v):
        mant, ls = _bessel_part(xi, v, ctl)
        return mant * np.exp(ls - v * v * inv4t + log_pref)

    def coeffs(v0):
        b, c = _growth_coeffs(xi, v0)
        return inv4t, b, c + log_pref

    hint = DecayHint.gaussian(coeffs, start=_tail_start(xi, 0.0))
    return integrate_semi_infinite(integrand, xi, hint, spec)


def _kernel_g_outcome(xi, tau, spec, ctl, log_factor=0.0):
    log_pref = log_factor - math.log(4.0 * _SQRT_PI) - 2.5 * math.log(tau)
    inv4t = 1.0 / (4.0 * tau)

    def integrand(v):
        mant, ls = _bessel_part(xi, v, ctl)
        return (v * v - 2.0 * tau) * mant * np.exp(ls - v * v * inv4t + log_pref)

    def coeffs(v0):
        # |v^2 - 2 tau| <= v^2 once v^2 >= tau, and ln v^2 <= 2 ln v0 + 2 (v - v0)/v0.
        b, c = _growth_coeffs(xi, v0)
        return inv4t, b + 2.0 / v0, c + 2.0 * math.log(v0) - 2.0 + log_pref

    hint = DecayHint.gaussian(coeffs, start=_tail_start(xi, math.sqrt(tau)))
    return integrate_semi_infinite(integrand, xi, hint, spec, breakpoints=(math.sqrt(2 * tau),))


def kernel_f(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD,
             ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Kernel f(xi, tau), the inverse transform of exp(-xi sqrt(s) + xi/sqrt(s)) / s."""
    return _kernel_f_outcome(c.xi, c.tau, spec, ctl)


def kernel_g(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD,
             ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Kernel g = df/dtau."""
    return _kernel_g_outcome(c.xi, c.tau, spec, ctl)


def delta_response(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD,
                   ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Response exp(-tau) g(xi, tau) to a unit impulse at the boundary."""
    return _kernel_g_outcome(c.xi, c.tau, spec, ctl, log_factor=-c.tau)


def step_response(c: DimensionlessCoord, spec: QuadSpec = DEFAULT_QUAD,
                  ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Response to a Heaviside pulse at the boundary.

    The integrand is 0F1~ times

        exp(-v^2/4tau - tau)/sqrt(pi tau) + e^-v/2 erfc(A) - e^v/2 erfc(B),
        A = (v - 2 tau)/(2 sqrt(tau)),  B = (v + 2 tau)/(2 sqrt(tau)).

    Writing ``e^{-v} erfc(A) = erfcx(A) exp(-v^2/4tau - tau)`` (and likewise
    for B) puts all three terms on one exponential; for ``A < 0`` the
    reflection ``erfc(A) = 2 - erfc(-A)`` leaves a bounded ``e^{-v}`` term.
    """
    xi, tau = c.xi, c.tau
    st = math.sqrt(tau)
    inv4t = 1.0 / (4.0 * tau)
    c0 = 1.0 / math.sqrt(math.pi * tau)

    def integrand(v):
        mant, ls = _bessel_part(xi, v, ctl)
        a = (v - 2.0 * tau) / (2.0 * st)
        b = (v + 2.0 * tau) / (2.0 * st)
        neg = a < 0
        ea = specfun.erfcx(np.abs(a))
        bracket = c0 + np.where(neg, -0.5, 0.5) * ea - 0.5 * specfun.erfcx(b)
        out = bracket * np.exp(ls - v * v * inv4t - tau)
        out = out + np.where(neg, np.exp(ls - v), 0.0)
        return mant * out

    log_amp = math.log(c0 + 0.5)

    def coeffs(v0):
        # For v >= 2 tau the bracket is at most (c0 + 1/2) exp(-v^2/4tau - tau).
        b, cc = _growth_coeffs(xi, v0)
        return inv4t, b, cc - tau + log_amp

    hint = DecayHint.gaussian(coeffs, start=_tail_start(xi, 2.0 * tau))
    bps = (2.0 * tau,) if 2.0 * tau > xi else ()
    return integrate_semi_infinite(integrand, xi, hint, spec, breakpoints=bps)


def _pointwise(fn: Callable[[float], EvalOutcome], rel_tol: float, stats: dict):
    """Vectorize a scalar EvalOutcome-valued function for use as an integrand.

    Each inner error is split as ``rel_tol * |value| + excess``; ``stats``
    keeps the largest excess seen, so the inner errors integrate to at most
    ``rel_tol * int |value| + span * excess``.
    """
    def wrapped(x):
        out = np.empty_like(x)
        for i, xv in enumerate(x):
            res = fn(float(xv))
            out[i] = res.value
            excess = max(res.error_estimate - rel_tol * abs(res.value), 0.0)
            stats["excess"] = max(stats["excess"], excess)
            stats["evals"] += res.function_evals
            stats["ok"] = stats["ok"] and res.converged
        return out
    return wrapped


def _new_stats():
    return {"excess": 0.0, "evals": 0, "ok": True}


def general_response(pulse: PulseSignal, c: DimensionlessCoord,
                     p: MaterialParams = UNIT_MATERIAL,
                     spec: QuadSpec = DEFAULT_QUAD,
                     ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Response to an arbitrary boundary pulse by convolution with exp(-tau') g.

    ``r(xi, tau) = int_0^tau r0(t_eps (tau - tau')) exp(-tau') g(xi, tau') dtau'``.
    Delta pulses dispatch to :func:`delta_response`.  At ``xi = 0`` the
    kernel collapses to a Dirac mass and the boundary value is returned.
    """
    xi, tau = c.xi, c.tau
    if pulse.kind is PulseKind.DELTA:
        return delta_response(c, spec, ctl)
    if pulse.kind is PulseKind.SAMPLED:
        t_first, t_last = pulse.samples[0][0], pulse.samples[-1][0]
        if t_first > 0 or t_last < p.t_eps * tau:
            raise DomainError(
                f"sampled pulse covers [{t_first}, {t_last}] s, "
                f"needs [0, {p.t_eps * tau}] s")
    if xi == 0:
        return EvalOutcome(float(pulse(p.t_eps * tau)), 0.0, 0, True)

    inner = spec.scaled(0.1)
    stats = _new_stats()
    kernel = _pointwise(
        lambda tp: _kernel_g_outcome(xi, tp, inner, ctl, log_factor=-tp),
        inner.rel_tol, stats)

    def integrand(tp):
        return pulse(p.t_eps * (tau - tp)) * kernel(tp)

    bps = ()
    if pulse.kind is PulseKind.SAMPLED:
        bps = [tau - t / p.t_eps for t, _ in pulse.samples]
    outer = integrate_finite(integrand, 0.0, tau, spec, bps)
    peak_r0 = 1.0
    if pulse.kind is PulseKind.SAMPLED:
        peak_r0 = max(abs(r) for _, r in pulse.samples)
    # exp(-xi s / sqrt(1+s)) is completely monotone (s / sqrt(1+s) is a
    # Bernstein function), so exp(-tau') g is a probability density in tau'
    # and its integral over (0, tau) is at most 1.
    inner_err = inner.rel_tol * peak_r0 + tau * stats["excess"]
    err = outer.error_estimate + inner_err
    ok = outer.converged and stats["ok"] and err <= spec.tolerance(outer.value)
    return EvalOutcome(outer.value, err, outer.function_evals + stats["evals"], ok)


def normalization(xi: float, t_max: float = 60.0,
                  spec: QuadSpec = DEFAULT_QUAD,
                  ctl: SeriesControl = DEFAULT_SERIES) -> EvalOutcome:
    """Numerical value of int_0^inf exp(-t) f(xi, t) dt (analytically 1).

    The range is cut at ``t_max``; the discarded part is bounded using
    ``f(xi, t) <= 2 exp(2 xi + t/4)`` (from ``2 sqrt(xi v) <= 2 xi + v/2``),
    which gives a tail of at most ``(8/3) exp(2 xi - 3 t_max / 4)``.
    """
    inner = QuadSpec(rel_tol=0.1 * spec.rel_tol, abs_tol=0.1 * spec.abs_tol / t_max,
                     max_subdivisions=spec.max_subdivisions,
                     tail_tol_fraction=spec.tail_tol_fraction)
    stats = _new_stats()
    kernel = _pointwise(
        lambda t: _kernel_f_outcome(xi, t, inner, ctl, log_factor=-t),
        inner.rel_tol, stats)
    outer = integrate_finite(kernel, 0.0, t_max, spec)
    tail = 8.0 / 3.0 * math.exp(2 * xi - 0.75 * t_max)
    # f >= 0, so the integral of |integrand| is the value itself.
    inner_err = inner.rel_tol * abs(outer.value) + t_max * stats["excess"]
    err = outer.error_estimate + inner_err + tail
    ok = outer.converged and stats["ok"] and err <= spec.tolerance(outer.value)
    return EvalOutcome(outer.value, err, outer.function_evals + stats["evals"], ok)


# --------------------------------------------------------------------------
# asymptotic forms

def step_asym_small_tau(c: DimensionlessCoord) -> float:
    """erfc(xi / (2 sqrt(tau))), valid for tau -> 0 or xi -> inf."""
    return float(specfun.erfc(c.xi / (2.0 * math.sqrt(c.tau))))


def step_asym_large_tau(c: DimensionlessCoord,
                        ctl: SeriesControl = DEFAULT_SERIES) -> float:
    xi, tau = c.xi, c.tau
    z = xi * xi * tau / 4.0
    inner = (0.5 * specfun.hyp0f2(0.5, 2.0, z, ctl)
             + 2.0 * xi * math.sqrt(tau) / (3.0 * _SQRT_PI)
             * specfun.hyp0f2(1.5, 2.5, z, ctl))
    return 1.0 - xi * xi * math.exp(-tau) * inner


def step_asym_small_xi(c: DimensionlessCoord) -> float:
    xi, tau = c.xi, c.tau
    e = math.exp(-tau)
    return 1.0 - e / math.sqrt(math.pi * tau) * xi - 0.5 * (1.0 + e) * xi * xi


def delta_asym_small_tau(c: DimensionlessCoord) -> float:
    xi, tau = c.xi, c.tau
    if xi == 0:
        return 0.0
    return math.exp(math.log(xi / (2.0 * _SQRT_PI)) - 1.5 * math.log(tau)
                    - xi * xi / (4.0 * tau) - tau)


def delta_asym_large_tau(c: DimensionlessCoord,
                         ctl: SeriesControl = DEFAULT_SERIES) -> float:
    xi, tau = c.xi, c.tau
    z = xi * xi * tau / 4.0
    st = math.sqrt(tau)
    inner = (2.0 * xi * xi * st / (9.0 * _SQRT_PI) * specfun.hyp0f2(2.5, 2.5, z, ctl)
             + 0.5 * xi * specfun.hyp0f2(1.5, 2.0, z, ctl)
             + specfun.hyp0f2(1.5, 1.5, z, ctl) / (_SQRT_PI * st))
    return xi * math.exp(-tau) * inner


def delta_asym_small_xi(c: DimensionlessCoord) -> float:
    xi, tau = c.xi, c.tau
    return xi * math.exp(-tau) * (
        0.5 * xi + (1.0 + 0.5 / tau) / math.sqrt(math.pi * tau))
