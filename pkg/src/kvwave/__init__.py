"""Transient pulse response of a semi-infinite Kelvin-Voigt medium."""

from .kvcore import (
    DimensionlessCoord,
    MaterialParams,
    PulseKind,
    PulseSignal,
    delta_response,
    general_response,
    kernel_f,
    kernel_g,
    step_response,
    to_dimensionless,
)
from .quadrature import EvalOutcome, QuadSpec

__version__ = "0.1.0"

__all__ = [
    "DimensionlessCoord",
    "EvalOutcome",
    "MaterialParams",
    "PulseKind",
    "PulseSignal",
    "QuadSpec",
    "delta_response",
    "general_response",
    "kernel_f",
    "kernel_g",
    "step_response",
    "to_dimensionless",
]
