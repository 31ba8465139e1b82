"""Structured pass/fail records shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    name: str
    passed: bool = True
    witnesses: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def fail(self, **witness: Any) -> None:
        self.passed = False
        self.witnesses.append(witness)

    def merge(self, other: "CheckReport") -> None:
        if not other.passed:
            self.passed = False
        self.witnesses.extend({"from": other.name, **w} for w in other.witnesses)

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witnesses": self.witnesses,
            "info": self.info,
        }
