"""Uniform pass/fail reports with witnesses, shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None
    note: str = ""

    def to_json(self):
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    scope: str = ""
    summary: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness=None, note: str = "") -> Check:
        check = Check(name, bool(passed), witness, note)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        out = {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }
        if self.scope:
            out["scope"] = self.scope
        if self.summary:
            out["summary"] = self.summary
        return out
