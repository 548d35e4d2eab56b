"""Custom exception classes for firstint."""

from typing import Any


class FirstIntegralError(Exception):
    """Base exception for all firstint errors."""

    def context(self) -> dict[str, Any]:
        """Return the structured context attached to this error."""
        return {}


class ConfigurationError(FirstIntegralError):
    """Raised when configuration or an input document cannot be loaded."""

    pass


class InputError(FirstIntegralError):
    """Raised when an input document or argument violates its contract."""

    def __init__(self, message: str, pointer: str | None = None) -> None:
        """
        Initialize InputError.

        Args:
            message: Error message describing the issue
            pointer: JSON pointer to the offending location (e.g. "/matrices/0/1")
        """
        super().__init__(message)
        self.pointer = pointer

    def context(self) -> dict[str, Any]:
        return {"pointer": self.pointer}


class NumericalError(FirstIntegralError):
    """Raised when an iterative numerical procedure fails to converge."""

    def __init__(self, message: str, residuals: list[float] | None = None) -> None:
        """
        Initialize NumericalError.

        Args:
            message: Error message describing the issue
            residuals: Residuals at the point of failure
        """
        super().__init__(message)
        self.residuals = residuals or []

    def context(self) -> dict[str, Any]:
        return {"residuals": self.residuals}


class StructuralError(FirstIntegralError):
    """Raised when the algebraic structure needed by a construction is missing."""

    def __init__(self, message: str, achieved: int | None = None) -> None:
        """
        Initialize StructuralError.

        Args:
            message: Error message describing the issue
            achieved: Size actually achieved (chain length, rank, ...)
        """
        super().__init__(message)
        self.achieved = achieved

    def context(self) -> dict[str, Any]:
        return {"achieved": self.achieved}


class DomainError(FirstIntegralError):
    """Raised when an expression is evaluated on an excluded hyperplane."""

    def __init__(self, message: str, hyperplane: str | None = None) -> None:
        """
        Initialize DomainError.

        Args:
            message: Error message describing the issue
            hyperplane: Rendered form of the offending hyperplane
        """
        super().__init__(message)
        self.hyperplane = hyperplane

    def context(self) -> dict[str, Any]:
        return {"hyperplane": self.hyperplane}


class SolvabilityError(FirstIntegralError):
    """Raised when a system is not completely solvable or forcing is incompatible."""

    def __init__(self, message: str, verdict: dict[str, Any] | None = None) -> None:
        """
        Initialize SolvabilityError.

        Args:
            message: Error message describing the issue
            verdict: Serialized solvability verdict
        """
        super().__init__(message)
        self.verdict = verdict

    def context(self) -> dict[str, Any]:
        return {"verdict": self.verdict}


class VerificationError(FirstIntegralError):
    """Raised when constructed integrals fail numerical verification."""

    def __init__(self, message: str, failures: list[dict[str, Any]] | None = None) -> None:
        """
        Initialize VerificationError.

        Args:
            message: Error message describing the issue
            failures: Per-integral failure records
        """
        super().__init__(message)
        self.failures = failures or []

    def context(self) -> dict[str, Any]:
        return {"failures": self.failures}
