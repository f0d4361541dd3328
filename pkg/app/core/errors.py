"""
Error hierarchy for the beta-manifold toolkit.

The CLI maps these to its exit-code contract:
  1: numerical failure (ConvergenceError, BoundaryEscapeError, NumericalDegeneracyError)
  2: usage / parse error (everything else)
"""

from typing import Optional, Tuple


class BetaGeometryError(Exception):
    """Root of every error raised by this package."""

    exit_code: int = 2


# ============================================================================
# USAGE ERRORS
# ============================================================================

class DomainError(BetaGeometryError, ValueError):
    """Argument outside the domain of a special function or of the manifold."""


class ArgumentError(BetaGeometryError, ValueError):
    """Precondition violated by the caller."""


class DegenerateSampleError(BetaGeometryError, ValueError):
    """Samples carry no spread: a beta distribution cannot be fitted."""


class InputParseError(BetaGeometryError):
    """Malformed input file; `line` is 1-based."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


# ============================================================================
# NUMERICAL FAILURES
# ============================================================================

class NumericalError(BetaGeometryError):
    exit_code = 1


class NumericalDegeneracyError(NumericalError, ArithmeticError):
    """Metric determinant is not positive (cannot happen for valid points)."""


class BoundaryEscapeError(NumericalError):
    """A geodesic left the positive quadrant.

    `last_state` is the last valid (x, y, u, v) and `time` its time stamp.
    """

    def __init__(self, message: str, last_state: Tuple[float, float, float, float], time: float):
        self.last_state = tuple(float(v) for v in last_state)
        self.time = float(time)
        super().__init__(f"{message} (last valid state at t={self.time:.4f}: {self.last_state})")


class ConvergenceError(NumericalError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(f"{message} (residual={self.residual:.3e} after {self.iterations} iterations)")
