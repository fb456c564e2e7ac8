"""Canned benchmark problems with PASS/FAIL acceptance metrics."""

from xthm.benchmarks.cases import (
    BENCHMARKS,
    BenchmarkReport,
    Criterion,
    benchmark_config,
    run_benchmark,
)

__all__ = ["BENCHMARKS", "BenchmarkReport", "Criterion", "benchmark_config", "run_benchmark"]
