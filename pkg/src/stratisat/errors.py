"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    """Raised when a `.3lqst` source is rejected. Carries at least one Diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ResourceLimit(RuntimeError):
    """A computation stopped because a budget was exhausted.

    This is never a verdict: callers must not treat it as unsat or invalid.
    """

    def __init__(self, stage: str, budget, detail: str = ""):
        self.stage = stage
        self.budget = budget
        msg = f"{stage}: budget {budget} exceeded"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnassignedVariable(LookupError):
    pass


class NotInFragment(ValueError):
    """decide() was asked to solve a formula outside the restricted fragment."""

    def __init__(self, report):
        self.report = report
        super().__init__("formula is not in the restricted fragment")
