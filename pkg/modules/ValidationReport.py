"""Result objects returned by the diagnostic operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subject: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "message": self.message, "subject": self.subject}


@dataclass
class ValidationReport:
    """Every violated invariant, in the order the scan met them. Empty means valid."""

    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, code: str, message: str, subject: str = "") -> None:
        self.violations.append(Violation(code, message, subject))

    def extend(self, other: ValidationReport, prefix: str = "") -> None:
        for violation in other.violations:
            message = f"{prefix}{violation.message}" if prefix else violation.message
            self.violations.append(Violation(violation.code, message, violation.subject))
        self.notes.extend(other.notes)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [violation.code for violation in self.violations]

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.is_valid,
            "violations": [violation.to_dict() for violation in self.violations],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class CheckResult:
    """Boolean outcome plus the first counterexample in lexicographic scan order."""

    holds: bool
    counterexample: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict[str, Any]:
        return {"holds": self.holds, "counterexample": self.counterexample, **self.details}
