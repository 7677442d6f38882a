"""Scenario sweeps and the memory-comparison report built on top of them."""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import RunConfig
from .contract import solve_second_best
from .engine import ScenarioSpec, expand_grid, make_spec, map_scenarios, run_scenario
from .model import Benchmark, Capacity, format_capacity, parse_capacity
from .stats import METRICS, NormalizedSeries, euclidean_distance, normalized_matrix, significance_test, summarize

log = logging.getLogger(__name__)

ENVIRONMENTS = {0.05: "stable", 0.25: "mid-turbulent", 0.45: "turbulent"}
COMPARISON_METRIC = "utility_agent"


@dataclass
class ScenarioSummary:
    spec: ScenarioSpec
    matrices: Dict[str, np.ndarray]
    rejections: int

    @property
    def series(self) -> Dict[str, NormalizedSeries]:
        return {m: summarize(self.matrices[m], m) for m in METRICS}

    @property
    def key(self):
        p = self.spec.params
        return (p.memory_principal, p.memory_agent, p.sigma_frac)


@dataclass(frozen=True)
class Comparison:
    environment: str
    comparison: str
    metric: str
    distance: float
    p_value: float


def summarize_scenario(spec: ScenarioSpec, benchmark: Benchmark) -> ScenarioSummary:
    rounds = run_scenario(spec, benchmark)
    matrices = {m: normalized_matrix(rounds, m, benchmark) for m in METRICS}
    return ScenarioSummary(spec, matrices, sum(r.rejections for r in rounds))


def run_specs(specs: Sequence[ScenarioSpec], benchmark: Benchmark, workers=1) -> List[ScenarioSummary]:
    return map_scenarios(functools.partial(summarize_scenario, benchmark=benchmark), specs, workers)


def sweep_specs(cfg: RunConfig, benchmark: Optional[Benchmark] = None) -> List[ScenarioSpec]:
    benchmark = benchmark or solve_second_best(cfg.eta, cfg.reservation_utility)
    return expand_grid(
        cfg.grid_memory_principal, cfg.grid_memory_agent, cfg.grid_sigma_frac,
        constants=cfg.model_params(), base_seed=cfg.base_seed, benchmark=benchmark,
    )


def single_spec(cfg: RunConfig, benchmark: Optional[Benchmark] = None) -> ScenarioSpec:
    benchmark = benchmark or solve_second_best(cfg.eta, cfg.reservation_utility)
    return make_spec(cfg.model_params(sigma=cfg.sigma_frac * benchmark.outcome_star), cfg.base_seed)


def environment_name(sigma_frac: float) -> str:
    for value, name in ENVIRONMENTS.items():
        if np.isclose(sigma_frac, value):
            return name
    return f"sigma={sigma_frac:g}"


def comparison_pairs(keys, low: Capacity = 1, high: Capacity = 5):
    """Pairs of scenario keys differing only in one actor's memory (low -> high).

    Yields ``(environment_sigma, label, key_low, key_high)`` in the order
    principal comparisons first, then agent comparisons, per environment.
    """
    low, high = parse_capacity(low), parse_capacity(high)
    present = set(keys)
    sigmas = sorted({k[2] for k in present})
    lo_s, hi_s = format_capacity(low), format_capacity(high)
    for sf in sigmas:
        for other in (low, high):
            a, b = (low, other, sf), (high, other, sf)
            if a in present and b in present:
                yield sf, f"m_p:{lo_s}->{hi_s}@m_a={format_capacity(other)}", a, b
        for other in (low, high):
            a, b = (other, low, sf), (other, high, sf)
            if a in present and b in present:
                yield sf, f"m_a:{lo_s}->{hi_s}@m_p={format_capacity(other)}", a, b


def compare_memories(
    matrices: Dict[tuple, np.ndarray],
    metric: str = COMPARISON_METRIC,
    permutations: int = 10_000,
    seed: int = 0,
) -> List[Comparison]:
    """Distances between mean curves (and permutation p-values) for memory 1 -> 5."""
    out = []
    for sf, label, a, b in comparison_pairs(matrices.keys()):
        ma, mb = matrices[a], matrices[b]
        distance = euclidean_distance(ma.mean(axis=0), mb.mean(axis=0))
        p = significance_test(ma, mb, permutations=permutations, seed=seed)
        out.append(Comparison(environment_name(sf), label, metric, distance, p))
    return out


@dataclass
class ExperimentResult:
    config: RunConfig
    benchmark: Benchmark
    scenarios: List[ScenarioSummary]
    comparisons: List[Comparison]


def run_experiment(cfg: RunConfig, specs: Optional[Sequence[ScenarioSpec]] = None, permutations: int = 10_000) -> ExperimentResult:
    benchmark = solve_second_best(cfg.eta, cfg.reservation_utility)
    specs = list(specs) if specs is not None else sweep_specs(cfg, benchmark)
    summaries = run_specs(specs, benchmark, cfg.workers)
    for s in summaries:
        if s.rejections:
            log.info("%s: %d no-contract periods", s.spec.scenario_id, s.rejections)
    matrices = {s.key: s.matrices[COMPARISON_METRIC] for s in summaries}
    comparisons = compare_memories(matrices, permutations=permutations, seed=cfg.base_seed)
    return ExperimentResult(cfg, benchmark, summaries, comparisons)
