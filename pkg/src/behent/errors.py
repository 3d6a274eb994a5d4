"""Exception hierarchy shared by every module.

Each error carries a ``category`` (mapped to a CLI exit code) and the name of
the ``module`` that raised it.
"""

from __future__ import annotations


class BehentError(Exception):
    category = "error"
    exit_code = 1

    def __init__(self, detail: str, module: str = "behent"):
        super().__init__(detail)
        self.detail = detail
        self.module = module

    def structured(self) -> str:
        return f"error[{self.category}/{self.module}]: {self.detail}"


class ValidationError(BehentError, ValueError):
    """Bad parameters or malformed input values."""

    category = "validation"
    exit_code = 2


class DomainError(ValidationError):
    """Argument outside the domain of a mathematical function."""

    category = "domain"


class NumericError(BehentError, ArithmeticError):
    category = "numeric"
    exit_code = 3


class DegenerateSampleError(NumericError):
    """Coincident points make the k-NN radius vanish."""

    category = "degenerate"

    def __init__(self, detail: str, indices=(), module: str = "density"):
        super().__init__(detail, module)
        self.indices = tuple(int(i) for i in indices)


class UnknownFamilyError(ValidationError):
    """No analytic oracle exists for the requested distribution/estimator pair."""

    category = "unknown-family"


class DatasetIOError(BehentError, OSError):
    category = "io"
    exit_code = 4

    def __init__(self, detail: str, module: str = "io", line: int | None = None):
        super().__init__(detail, module)
        self.line = line
