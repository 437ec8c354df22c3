"""Check reports: named pass/fail entries with measured deviations.

The verification suites return these instead of raising, so a whole suite
can run to completion and the CLI can print one line per check.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    deviation: float
    detail: str = ""


@dataclass
class Report:
    """Ordered collection of checks with an overall verdict."""

    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, deviation: float, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), float(deviation), detail))

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def max_deviation(self) -> float:
        return max((c.deviation for c in self.checks), default=0.0)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        """Structured text: one ``check <name> <pass|fail> <deviation>`` line each."""
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "fail"
            line = f"check {c.name} {status} {c.deviation:.3e}"
            if c.detail:
                line += f" {c.detail}"
            lines.append(line)
        lines.append(f"overall {'pass' if self.ok else 'fail'}")
        return "\n".join(lines)
