"""Exception hierarchy.

Two families matter to callers: :class:`ParameterError` for inputs that fail
validation (CLI exit status 2) and :class:`NumericalError` for failures that
happen while computing (CLI exit status 3).
"""

from __future__ import annotations


class PenningError(Exception):
    """Base class for all package errors."""


class ParameterError(PenningError, ValueError):
    """Invalid or inconsistent trap/drive parameters."""


class NumericalError(PenningError, RuntimeError):
    """A numerical procedure failed or produced an unusable result."""


class SingularConfigurationError(NumericalError):
    """Two or more ions coincide, so the Coulomb energy is undefined."""


class ConvergenceError(NumericalError):
    def __init__(self, message: str, grad_norm: float, iterations: int):
        super().__init__(message)
        self.grad_norm = grad_norm
        self.iterations = iterations


class SaddlePointError(NumericalError):
    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class UnstableEquilibriumError(NumericalError):
    """Stiffness matrix has a negative eigenvalue beyond tolerance."""


class ImaginaryModeError(NumericalError):
    """An operation needs a real (stable) mode but got an imaginary one."""


class ResonanceError(NumericalError):
    def __init__(self, message: str, mode_index: int, mode_frequency: float):
        super().__init__(message)
        self.mode_index = mode_index
        self.mode_frequency = mode_frequency


class FitRefusedError(NumericalError):
    """Coupling matrix is too frustrated for a power-law fit; use a histogram."""

    def __init__(self, message: str, majority_fraction: float):
        super().__init__(message)
        self.majority_fraction = majority_fraction


class DegenerateGeometryError(NumericalError):
    """Point set is degenerate (e.g. collinear) for the requested geometry."""
