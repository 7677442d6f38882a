"""Normalized time-series metrics, confidence bands and curve comparisons."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import Benchmark

METRICS = ("premium", "effort", "utility_principal", "utility_agent")
Z99 = 2.576


@dataclass(frozen=True)
class NormalizedSeries:
    metric: str
    values: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if not len(self.values) == len(self.ci_low) == len(self.ci_high):
            raise ValueError("series and band lengths differ")


def normalized_matrix(rounds: Sequence, metric: str, benchmark: Benchmark) -> np.ndarray:
    """Per-round traces of ``metric`` divided by its benchmark value, shape ``(R, T)``."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    divisor = benchmark.divisor(metric)
    if divisor == 0:
        raise ValueError(f"benchmark value for {metric} is zero")
    data = np.array([getattr(r, metric) for r in rounds], dtype=float)
    if data.ndim != 2:
        raise ValueError("rounds must all have the same number of timesteps")
    return data / divisor


def summarize(matrix: np.ndarray, metric: str, z: float = Z99) -> NormalizedSeries:
    """Mean over rounds with a normal-approximation band; zero width for R = 1."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if n == 0:
        raise ValueError("need at least one round")
    mean = matrix.mean(axis=0)
    half = z * matrix.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    return NormalizedSeries(metric, mean, mean - half, mean + half)


def normalize_series(rounds: Sequence, metric: str, benchmark: Benchmark) -> NormalizedSeries:
    return summarize(normalized_matrix(rounds, metric, benchmark), metric)


def euclidean_distance(series_a, series_b) -> float:
    a = np.asarray(series_a, dtype=float)
    b = np.asarray(series_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = np.abs(a - b)
    scale = d.max() if d.size else 0.0
    if scale == 0.0:
        return 0.0
    # scaled so tiny differences do not underflow to a zero distance
    return float(scale * np.sqrt(np.sum((d / scale) ** 2)))


def significance_test(group_a, group_b, permutations: int = 10_000, seed: int = 0, chunk: int = 250) -> float:
    """Permutation p-value for the distance between two groups' mean curves.

    Each group is an ``(n_rounds, T)`` array of per-round traces. Round labels
    are shuffled ``permutations`` times; ``p = (1 + #{d_perm >= d_obs}) / (1 + permutations)``.
    """
    a = np.atleast_2d(np.asarray(group_a, dtype=float))
    b = np.atleast_2d(np.asarray(group_b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("groups must be non-empty")
    if a.shape[1] != b.shape[1]:
        raise ValueError("groups must share the number of timesteps")
    pooled = np.vstack([a, b])
    n_a, n = a.shape[0], pooled.shape[0]
    observed = euclidean_distance(a.mean(axis=0), b.mean(axis=0))
    total = pooled.sum(axis=0)

    rng = np.random.Generator(np.random.Philox(seed))
    # relative slack so exact ties are not lost to summation order
    threshold = observed * (1.0 - 1e-12)
    hits, done = 0, 0
    while done < permutations:
        m = min(chunk, permutations - done)
        order = rng.permuted(np.tile(np.arange(n), (m, 1)), axis=1)
        sum_a = pooled[order[:, :n_a]].sum(axis=1)
        mean_a = sum_a / n_a
        mean_b = (total - sum_a) / (n - n_a)
        d = np.sqrt(np.sum((mean_a - mean_b) ** 2, axis=1))
        hits += int(np.count_nonzero(d >= threshold))
        done += m
    return (1 + hits) / (1 + permutations)


@dataclass(frozen=True)
class CVReport:
    stabilizing_rounds: Optional[int]
    checkpoints: np.ndarray
    cv: np.ndarray


def coefficient_of_variation_path(values, window_step: int) -> tuple:
    """CV of the first ``k`` values for ``k = step, 2*step, ...``; NaN where the mean vanishes."""
    x = np.asarray(values, dtype=float)
    ks = np.arange(window_step, x.size + 1, window_step)
    scale = max(float(np.max(np.abs(x))), 1.0) if x.size else 1.0
    cv = np.full(ks.size, np.nan)
    for i, k in enumerate(ks):
        head = x[:k]
        mean = head.mean()
        if abs(mean) <= 1e-12 * scale:
            continue
        cv[i] = head.std(ddof=1) / abs(mean)
    return ks, cv


def cv_report(values, window_step: int = 50, threshold: float = 0.01) -> CVReport:
    x = np.asarray(values, dtype=float)
    if window_step < 1:
        raise ValueError("window_step must be positive")
    if x.size < 2 * window_step:
        raise ValueError(f"need at least {2 * window_step} values, got {x.size}")
    ks, cv = coefficient_of_variation_path(x, window_step)
    undefined = np.isnan(cv)
    if undefined.any():
        warnings.warn(f"{int(undefined.sum())} windows with zero mean skipped (CV undefined)", RuntimeWarning, stacklevel=2)
    defined = np.flatnonzero(~undefined)
    if defined.size == 0:
        return CVReport(None, ks, cv)
    diffs = np.abs(np.diff(cv[defined]))
    # first defined checkpoint after which every successive change stays below threshold
    start = defined.size - 1
    while start > 0 and diffs[start - 1] < threshold:
        start -= 1
    return CVReport(int(ks[defined[start]]), ks, cv)


def cv_stabilization(outcome_per_round, window_step: int = 50, threshold: float = 0.01) -> Optional[int]:
    """Smallest run count after which the CV moves by less than ``threshold`` per step."""
    return cv_report(outcome_per_round, window_step, threshold).stabilizing_rounds
