"""Wall-time measurements of manifold primitives over a range of sizes.

Output is for documentation only; nothing here is asserted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .diagnostics import default_shape
from .errors import ConfigurationError
from .manifolds import complex_normal, make_manifold

PRIMITIVES = (
    "random",
    "random_tangent",
    "proj",
    "inner",
    "egrad_to_rgrad",
    "retraction",
    "vector_transport",
)


@dataclass(frozen=True)
class BenchConfig:
    kind: str = "stiefel"
    sizes: tuple = (16, 32, 64)
    reps: int = 20
    seed: int = 0
    metric: Optional[str] = None
    retraction: Optional[str] = None

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigurationError("reps must be at least 1")
        if not self.sizes or any(int(s) < 1 for s in self.sizes):
            raise ConfigurationError("sizes must be a non-empty list of positive integers")


def bench_shape(kind: str, n: int) -> tuple:
    """n is the matrix dimension; ranks and column counts are n // 2, POVMs have 4 elements."""
    half = max(1, n // 2)
    if kind == "choi":
        return default_shape(kind, n=n, r=half)
    return default_shape(kind, n=n, p=half, r=half, m=4)


def _time(fn, reps: int) -> list:
    out = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        out.append(1e3 * (time.perf_counter() - start))
    return out


def run_bench(config: BenchConfig) -> list:
    """One record per (size, primitive) with mean and min wall time in milliseconds."""
    manifold = make_manifold(config.kind, config.metric, config.retraction)
    rng = np.random.default_rng(config.seed)
    rows = []
    for n in config.sizes:
        shape = bench_shape(manifold.kind, int(n))
        x = manifold.random(shape, rng)
        v = manifold.random_tangent(x, rng)
        w = 0.1 * manifold.random_tangent(x, rng)
        e = complex_normal(rng, shape)
        calls = {
            "random": lambda: manifold.random(shape, rng),
            "random_tangent": lambda: manifold.random_tangent(x, rng),
            "proj": lambda: manifold.proj(x, e),
            "inner": lambda: manifold.inner(x, v, v),
            "egrad_to_rgrad": lambda: manifold.egrad_to_rgrad(x, e),
            "retraction": lambda: manifold.retraction(x, w),
            "vector_transport": lambda: manifold.vector_transport(x, v, w),
        }
        for name in PRIMITIVES:
            times = _time(calls[name], config.reps)
            rows.append(
                {
                    "kind": manifold.kind,
                    "metric": manifold.metric,
                    "retraction": manifold.retraction_method,
                    "n": int(n),
                    "shape": list(shape),
                    "primitive": name,
                    "reps": config.reps,
                    "mean_ms": float(np.mean(times)),
                    "min_ms": float(np.min(times)),
                }
            )
    return rows


def format_table(rows: list) -> str:
    header = f"{'kind':<10}{'n':>6}  {'primitive':<18}{'mean_ms':>12}{'min_ms':>12}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['kind']:<10}{r['n']:>6}  {r['primitive']:<18}{r['mean_ms']:>12.4f}{r['min_ms']:>12.4f}"
        )
    return "\n".join(lines)
