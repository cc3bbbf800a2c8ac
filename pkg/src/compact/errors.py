"""Exception hierarchy for the compact scheme toolkit.

Every error raised by ``src.compact`` derives from ``CompactSchemeError`` so the
CLI can map library failures to exit codes in one place.
"""

from __future__ import annotations

from typing import Any


class CompactSchemeError(Exception):
    """Base class for all toolkit errors."""

    module = "compact"


class ExpressionSyntaxError(CompactSchemeError):
    """Malformed expression text."""

    module = "exprparse"

    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at offset {offset} in {text!r}")
        self.text = text
        self.offset = offset


class ExpressionDomainError(CompactSchemeError):
    """Evaluation left the real domain (pole, log of non-positive, ...)."""

    module = "exprparse"

    def __init__(self, node: str, x: float, reason: str):
        super().__init__(f"{reason}: {node} at {x!r}")
        self.node = node
        self.x = x


class ProblemSpecError(CompactSchemeError):
    """Inconsistent continuous problem or grid."""

    module = "discretization"


class CoefficientError(CompactSchemeError):
    """Sampled coefficients violate positivity or finiteness."""

    module = "discretization"


class ZeroPivotError(CompactSchemeError):
    """Tridiagonal elimination hit a zero pivot."""

    module = "linalg"

    def __init__(self, row: int):
        super().__init__(f"zero pivot in row {row}")
        self.row = row


class SingularMatrixError(CompactSchemeError):
    module = "linalg"


class DenseLimitError(CompactSchemeError):
    """Dense formation refused above the order limit."""

    module = "linalg"


class ConvergenceFailure(CompactSchemeError):
    """An iteration hit its cap. ``partial`` holds whatever was computed."""

    module = "linalg"

    def __init__(self, message: str, partial: Any | None = None, iterations: int = 0):
        super().__init__(message)
        self.partial = partial
        self.iterations = iterations


class BoundUnavailableError(CompactSchemeError):
    """Gershgorin gap is not positive, so no bound can be certified."""

    module = "conditioning"


class EnumerationLimitError(CompactSchemeError):
    module = "charpoly"


class SolverError(CompactSchemeError):
    """Time marching failed at a given level."""

    module = "timestepper"

    def __init__(self, message: str, level: int):
        super().__init__(f"{message} (time level {level})")
        self.level = level


class ConfigError(CompactSchemeError):
    """Invalid run configuration; ``flag`` names the offending option."""

    module = "cli"

    def __init__(self, message: str, flag: str | None = None):
        super().__init__(f"--{flag}: {message}" if flag else message)
        self.flag = flag
