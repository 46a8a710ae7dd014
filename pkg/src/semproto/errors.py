"""Exception types and validation diagnostics shared across the package."""
from __future__ import annotations

from dataclasses import dataclass


class SemprotoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SemprotoError, ValueError):
    """A configuration value is out of range or names an unknown option."""


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding, tied to a line and/or sample of a dataset file."""

    message: str
    line: int | None = None
    sample_id: str | None = None

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.sample_id is not None:
            where.append(f"sample {self.sample_id!r}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class DatasetValidationError(SemprotoError):
    """Raised when a dataset (or matrix) fails validation; carries all findings."""

    def __init__(self, diagnostics: list[Diagnostic], source: str | None = None):
        self.diagnostics = list(diagnostics)
        self.source = source
        head = f"{len(self.diagnostics)} validation error(s)"
        if source:
            head += f" in {source}"
        detail = "; ".join(str(d) for d in self.diagnostics[:5])
        if len(self.diagnostics) > 5:
            detail += "; ..."
        super().__init__(f"{head}: {detail}" if detail else head)


class InseparableDataError(SemprotoError):
    """A positive sample's description already describes a negative sample.

    No sound class description can cover such a positive, so mining refuses
    to run rather than emit an unsound rule.
    """

    def __init__(self, positive_id: str, negative_id: str, label: str):
        self.positive_id = positive_id
        self.negative_id = negative_id
        self.label = label
        super().__init__(
            f"the description of positive sample {positive_id!r} (label {label!r}) already "
            f"describes negative sample {negative_id!r}; no sound rule can cover it, "
            "the classes are not separable in this representation"
        )


class GenerationError(SemprotoError):
    """Scene generation exhausted its rejection budget."""


class BudgetError(SemprotoError):
    """An exhaustive oracle was asked to run past its configured budget."""
