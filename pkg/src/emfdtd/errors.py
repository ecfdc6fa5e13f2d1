"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class EmfdtdError(Exception):
    """Base class for package errors."""


class ParameterError(EmfdtdError, ValueError):
    """A scalar argument is outside its allowed range."""


class ComputationError(EmfdtdError):
    """A numerical procedure failed to converge; message carries diagnostics."""


class FitError(EmfdtdError):
    """Curve fitting received unusable input."""


class RunAborted(EmfdtdError):
    """A time-stepping run was stopped mid-flight (non-finite fields)."""

    def __init__(self, step: int, message: str):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class Diagnostic:
    """One model-file problem, pointing at the offending line."""

    line: int
    col: int
    message: str

    def format(self, filename: str = "<model>") -> str:
        return f"{filename}:{self.line}: {self.message}"


class ValidationError(EmfdtdError):
    """Model text failed parsing or validation; carries all diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        summary = "; ".join(d.message for d in self.diagnostics[:4])
        if len(self.diagnostics) > 4:
            summary += f"; ... ({len(self.diagnostics)} problems)"
        super().__init__(summary)
