"""Numerics for the double Eisenstein kernel of level one and the nonvanishing of L-value products."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CapabilityError, ConvergenceError, DomainError, EisenKernelError, InsufficientCoefficientsError,
    ParameterError, PoleError, PreconditionError,
)
