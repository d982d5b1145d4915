"""Structured pass/fail output shared by the verification routines and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Check:
    name: str
    passed: bool
    residual: float | None = None
    min_eigenvalue: float | None = None
    threshold: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "residual": _num(self.residual),
            "min_eigenvalue": _num(self.min_eigenvalue),
            "threshold": _num(self.threshold),
            "pass": bool(self.passed),
        }
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)

    def residual(self, name: str, value: float, threshold: float, note: str = "") -> Check:
        c = Check(name, bool(value <= threshold), residual=value, threshold=threshold, note=note)
        self.checks.append(c)
        return c

    def eigen(self, name: str, value: float, tol: float, note: str = "") -> Check:
        c = Check(name, bool(value >= -tol), min_eigenvalue=value, threshold=-tol, note=note)
        self.checks.append(c)
        return c

    def flag(self, name: str, passed: bool, note: str = "") -> Check:
        c = Check(name, bool(passed), note=note)
        self.checks.append(c)
        return c

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.min_eigenvalue,
                                     c.threshold, c.note))
        for k, v in other.values.items():
            self.values[prefix + k] = v

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "values": {k: _num(v) for k, v in self.values.items()},
        }

    def table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'value':>12}  {'threshold':>12}  verdict"]
        for c in self.checks:
            value = c.residual if c.residual is not None else c.min_eigenvalue
            val = f"{value:12.3e}" if value is not None else f"{'-':>12}"
            thr = f"{c.threshold:12.1e}" if c.threshold is not None else f"{'-':>12}"
            lines.append(f"{c.name:<{width}}  {val}  {thr}  {'PASS' if c.passed else 'FAIL'}")
        return "\n".join(lines)
