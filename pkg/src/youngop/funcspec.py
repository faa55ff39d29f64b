"""Scalar functions paired with certified second-derivative bounds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainViolation, InvalidWindow

__all__ = ["FunctionSpec", "CURVATURE_SAMPLES"]

CURVATURE_SAMPLES = 1000
_UNIT_FULL = np.linspace(0.0, 1.0, CURVATURE_SAMPLES)
_UNIT_HALF = np.linspace(0.0, 1.0, CURVATURE_SAMPLES // 2)


@dataclass(frozen=True)
class FunctionSpec:
    """A twice-differentiable ``f`` with ``d <= f'' <= D`` on ``[lo, hi]``.

    The curvature bounds are not trusted: construction samples ``f_second``
    at ``CURVATURE_SAMPLES`` points (half linear, half geometric when
    ``lo > 0``) and rejects the
    spec if any sample escapes ``[d, D]`` by more than
    ``1e-10 * max(|d|, |D|, 1)``.
    """

    f: Callable[[np.ndarray], np.ndarray]
    f_second: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    d: float
    D: float
    name: str = "f"

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise InvalidWindow(f"interval must satisfy lo < hi, got [{lo}, {hi}]")
        if not self.d <= self.D:
            raise DomainViolation(f"curvature bounds out of order: d={self.d} > D={self.D}")
        if lo > 0:
            grid = np.concatenate([lo + (hi - lo) * _UNIT_HALF,
                                   lo * (hi / lo) ** _UNIT_HALF])
            grid[-1] = hi
        else:
            grid = lo + (hi - lo) * _UNIT_FULL
        grid[0] = lo
        with np.errstate(over="ignore"):
            fs = np.asarray(self.f_second(grid), dtype=np.float64)
        slack = 1e-10 * max(abs(self.d), abs(self.D), 1.0)
        bad = ~((fs >= self.d - slack) & (fs <= self.D + slack))
        if np.any(bad):
            t = grid[np.argmax(bad)]
            raise DomainViolation(
                f"{self.name}'' leaves [{self.d:.6g}, {self.D:.6g}] at t={t:.6g}"
            )

    def check_points(self, *points) -> None:
        for p in points:
            p = np.asarray(p, dtype=np.float64)
            if np.any(p < self.lo) or np.any(p > self.hi):
                raise DomainViolation(
                    f"point outside the interval [{self.lo:.6g}, {self.hi:.6g}] of {self.name}"
                )

    def __call__(self, t):
        return self.f(t)
