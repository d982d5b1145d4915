"""Run configuration shared by the command line and the self-test."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

from .majorant import DEFAULT_GRID


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    m: int = 4
    r_grid: tuple[float, ...] = field(default=DEFAULT_GRID)
    tol_eig: float = 1e-9
    tol_residual: float = 1e-8
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r_grid", tuple(sorted(set(float(r) for r in self.r_grid))))
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if not self.r_grid or any(r < 0.0 or r > 1.0 for r in self.r_grid):
            raise ValueError("grid must be a non-empty subset of [0, 1]")
        if self.tol_eig <= 0 or self.tol_residual <= 0:
            raise ValueError("tolerances must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["r_grid"] = list(self.r_grid)
        return d


def thread_cap(default: int = 1) -> int:
    """Worker count from NCBALL_THREADS, at least 1."""
    raw = os.environ.get("NCBALL_THREADS", "")
    try:
        return max(1, int(raw)) if raw.strip() else default
    except ValueError:
        raise ValueError(f"NCBALL_THREADS must be an integer, got {raw!r}") from None
