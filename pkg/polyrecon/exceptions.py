"""
Exception hierarchy. Each category maps to one CLI exit code.
"""
from typing import Optional

from polyrecon.constants import (
    EXIT_DETECTION_EMPTY,
    EXIT_INFEASIBLE,
    EXIT_IO,
    EXIT_VALIDATION,
)


class PolyreconError(Exception):
    """Base class for all package errors"""
    exit_code = 1


class ValidationError(PolyreconError, ValueError):
    """Invalid input: malformed polytope, parameter outside its domain, bad file content"""
    exit_code = EXIT_VALIDATION


class DetectionEmptyError(PolyreconError):
    """Peak extraction produced no facet indicators"""
    exit_code = EXIT_DETECTION_EMPTY


class ReconstructionError(PolyreconError):
    """Base class for failures while inverting a facet-indicator set"""
    exit_code = EXIT_INFEASIBLE


class SingularInputError(ReconstructionError):
    """Normals are not in general position"""


class MinkowskiInfeasibleError(ReconstructionError):
    """No sign assignment satisfies the closure condition"""

    def __init__(self, message: str, best_residual: float,
                 best_signs: Optional[tuple] = None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_signs = best_signs


class InconsistentIndicatorError(ReconstructionError):
    """Reconstructed areas disagree with the indicator set"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ClosureError(ReconstructionError):
    """EGI vectors do not sum to zero within tolerance"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class UnboundedRegionError(ReconstructionError):
    """Halfspace system has an unbounded feasible region"""


class EmptyRegionError(ReconstructionError):
    """Halfspace system has no full-dimensional feasible region"""


class QuadratureError(PolyreconError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance"""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class StorageError(PolyreconError, OSError):
    """Reading or writing an interchange file failed"""
    exit_code = EXIT_IO


class StageError(PolyreconError):
    """A pipeline stage failed; wraps the original error with its stage label"""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"{stage}: {error}")
        self.stage = stage
        self.error = error
        self.exit_code = getattr(error, 'exit_code', 1)
