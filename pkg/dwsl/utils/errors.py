"""
Exception hierarchy for the DWSL engine.
"""

from typing import Optional


class DwslError(Exception):
    """Base class for all errors raised by the package."""


class InputDomainError(DwslError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class DatasetFormatError(DwslError, ValueError):
    """A dataset, curve, checkpoint or report file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class TrainingDivergenceError(DwslError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"non-finite loss {loss!r} at training step {step}")


class SolverError(DwslError, RuntimeError):
    """Fixed-point iteration did not converge within its iteration cap."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"soft value iteration stopped after {iterations} iterations "
            f"with residual {residual:.3e}"
        )


class SupportError(DwslError, ValueError):
    """A policy row has no probability mass on any valid action."""


class EnumerationLimitError(DwslError, RuntimeError):
    """Exhaustive trajectory enumeration would exceed the configured cap."""
