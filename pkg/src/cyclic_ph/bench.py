"""Timing ladder for the points-to-barcode pipeline on evenly spaced circle samples."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .geometry import Circle, build_filtration, sample_curve
from .persistence import full_persistence


@dataclass(frozen=True)
class BenchResult:
    sizes: tuple[int, ...]
    seconds: tuple[float, ...]
    exponent: float

    def to_csv(self) -> str:
        rows = ["n,seconds"] + [f"{n},{s:.6f}" for n, s in zip(self.sizes, self.seconds)]
        return "\n".join(rows) + f"\n# exponent,{self.exponent:.2f}\n"


def circle_pipeline(n: int, max_dim: int):
    """Sample, build the full quadratic filtration, and compute its barcode."""
    filt = build_filtration(sample_curve(Circle(1.0), n))
    return full_persistence(filt, max_dim)


def fit_exponent(sizes, seconds) -> float:
    """Least-squares slope of log(seconds) against log(n)."""
    slope, _ = np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(seconds, float)), 1)
    return float(slope)


def run_bench(sizes, max_dim: int = 4, reps: int = 1) -> BenchResult:
    """Best-of-``reps`` wall time for each size, plus the fitted exponent."""
    times = []
    for n in sizes:
        best = float("inf")
        for _ in range(reps):
            start = time.perf_counter()
            circle_pipeline(n, max_dim)
            best = min(best, time.perf_counter() - start)
        times.append(best)
    return BenchResult(tuple(sizes), tuple(times), fit_exponent(sizes, times))
