"""Verifier reports: a flat list of named checks, each passed or failed."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    at: Optional[int] = None


@dataclass
class Report:
    kind: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "", at: Optional[int] = None) -> bool:
        self.checks.append(Check(name, bool(ok), detail, at))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "failures": [
                {"check": c.name, "detail": c.detail, **({"at": c.at} if c.at is not None else {})}
                for c in self.failures
            ],
            "checks": [c.name for c in self.checks],
        }

    def summary(self) -> str:
        if self.passed:
            return f"{self.kind}: all {len(self.checks)} checks passed"
        names = ", ".join(c.name for c in self.failures)
        return f"{self.kind}: {len(self.failures)} of {len(self.checks)} checks failed ({names})"
