"""Period loop, Monte Carlo rounds and scenario grids.

Rounds of one scenario are advanced in lockstep: beliefs, proposals and
responses are computed for every round at once, but each round owns its
random stream, so a round's trace does not depend on which other rounds
share the batch.

Per-round stream layout: a ``(timesteps, 3)`` table of uniforms drawn up front;
columns 0 and 1 place the principal's fresh candidates, column 2 becomes the
exogenous shock through the inverse normal CDF.
"""

from __future__ import annotations

import itertools
import logging
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy.special import ndtri

from .contract import solve_second_best
from .decision import propose_v, respond_v
from .learning import MemoryBuffer, estimate_exogenous, learned_expectation, observe_exogenous, remember
from .model import UNBOUNDED, Benchmark, Capacity, ModelParams, StepRecord, agent_utility, format_capacity, parse_capacity

log = logging.getLogger(__name__)

TRACE_FIELDS = (
    "effort", "theta", "outcome", "compensation", "utility_principal", "utility_agent",
    "accepted", "premium", "incited_effort", "belief_principal", "belief_agent",
)


@dataclass(frozen=True)
class ScenarioSpec:
    params: ModelParams
    scenario_id: str
    base_seed: int = 0


def scenario_id_for(memory_principal: Capacity, memory_agent: Capacity, sigma_frac: float) -> str:
    return f"mp={format_capacity(memory_principal)}_ma={format_capacity(memory_agent)}_sigma={sigma_frac:g}"


def make_spec(params: ModelParams, base_seed: int = 0) -> ScenarioSpec:
    return ScenarioSpec(params, scenario_id_for(params.memory_principal, params.memory_agent, params.sigma_frac), base_seed)


@dataclass
class RoundResult:
    """Trace of one round, stored as per-field arrays of length ``timesteps``."""

    seed: int
    rejections: int
    effort: np.ndarray
    theta: np.ndarray
    outcome: np.ndarray
    compensation: np.ndarray
    utility_principal: np.ndarray
    utility_agent: np.ndarray
    accepted: np.ndarray
    premium: np.ndarray
    incited_effort: np.ndarray
    belief_principal: np.ndarray
    belief_agent: np.ndarray

    def __len__(self) -> int:
        return len(self.effort)

    @property
    def steps(self) -> List[StepRecord]:
        return [
            StepRecord(t=i + 1, **{f: (bool(getattr(self, f)[i]) if f == "accepted" else float(getattr(self, f)[i]))
                                   for f in TRACE_FIELDS})
            for i in range(len(self))
        ]

    def identical(self, other: "RoundResult") -> bool:
        return (self.seed == other.seed and self.rejections == other.rejections
                and all(np.array_equal(getattr(self, f), getattr(other, f)) for f in TRACE_FIELDS))


def round_seed(base_seed: int, scenario_id: str, round_index: int) -> int:
    """64-bit seed for one round, keyed by (base seed, scenario, round)."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(zlib.crc32(scenario_id.encode()), int(round_index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def round_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def normal_from_uniform(u, mu: float, sigma: float):
    """Inverse-CDF normal variates; ``u`` is nudged off 0 so the tail stays finite."""
    u = np.maximum(np.asarray(u, dtype=float), np.finfo(float).tiny)
    return mu + sigma * ndtri(u)


def draw_noise(rng: np.random.Generator, n: int, mu: float, sigma: float) -> np.ndarray:
    return normal_from_uniform(rng.random(n), mu, sigma)


def run_rounds(spec: ScenarioSpec, round_indices: Sequence[int], benchmark: Optional[Benchmark] = None) -> List[RoundResult]:
    """Run the given rounds of ``spec`` side by side."""
    p = spec.params
    if benchmark is not None and benchmark.eta != p.eta:
        raise ValueError(f"benchmark solved for eta={benchmark.eta}, scenario has eta={p.eta}")
    if benchmark is not None and not np.isclose(p.sigma, p.sigma_frac * benchmark.outcome_star, rtol=1e-12, atol=0.0):
        raise ValueError(f"{spec.scenario_id}: sigma not resolved against the benchmark outcome")
    idx = list(round_indices)
    n, T = len(idx), p.timesteps
    seeds = [round_seed(spec.base_seed, spec.scenario_id, r) for r in idx]
    uniforms = np.stack([round_generator(s).random((T, 3)) for s in seeds]) if n else np.zeros((0, T, 3))
    shocks = normal_from_uniform(uniforms[:, :, 2], p.mu, p.sigma)

    mem_p = [MemoryBuffer(p.memory_principal) for _ in range(n)]
    mem_a = [MemoryBuffer(p.memory_agent) for _ in range(n)]
    incited = np.zeros(n)  # no incumbent before t = 1
    out = {f: np.zeros((n, T)) for f in TRACE_FIELDS}
    out["accepted"] = np.zeros((n, T), dtype=bool)

    for t in range(T):
        belief_p = np.array([learned_expectation(m, p.mu) for m in mem_p])
        belief_a = np.array([learned_expectation(m, p.mu) for m in mem_a])

        prop = propose_v(belief_p, incited, p.eta, p.reservation_utility, uniforms[:, t, :2])
        offered = prop.feasible
        premium = np.where(offered, prop.premium, 0.0)
        effort, _, accepted = respond_v(premium, belief_a, p.eta, p.reservation_utility)
        accepted &= offered
        effort = np.where(accepted, effort, 0.0)
        incited = np.where(offered, prop.incited_effort, incited)

        theta = shocks[:, t]
        x = np.where(accepted, effort + theta, 0.0)
        comp = x * premium
        out["effort"][:, t] = effort
        out["theta"][:, t] = theta
        out["outcome"][:, t] = x
        out["compensation"][:, t] = comp
        out["utility_principal"][:, t] = x - comp
        out["utility_agent"][:, t] = np.where(accepted, agent_utility(comp, effort, p.eta), p.reservation_utility)
        out["accepted"][:, t] = accepted
        out["premium"][:, t] = premium
        out["incited_effort"][:, t] = incited
        out["belief_principal"][:, t] = belief_p
        out["belief_agent"][:, t] = belief_a

        # without a contract the principal sees no outcome; the agent still sees the shock
        est = estimate_exogenous(x, incited)
        obs = np.where(accepted, observe_exogenous(x, effort), theta)
        for i in range(n):
            if accepted[i]:
                mem_p[i] = remember(mem_p[i], est[i])
            mem_a[i] = remember(mem_a[i], obs[i])

    results = []
    for i, s in enumerate(seeds):
        rejections = int(T - out["accepted"][i].sum())
        results.append(RoundResult(seed=s, rejections=rejections, **{f: out[f][i].copy() for f in TRACE_FIELDS}))
    total = sum(r.rejections for r in results)
    if total:
        log.info("%s: %d no-contract periods across %d rounds", spec.scenario_id, total, n)
    return results


def run_round(spec: ScenarioSpec, round_index: int, benchmark: Optional[Benchmark] = None) -> RoundResult:
    return run_rounds(spec, [round_index], benchmark)[0]


def run_scenario(spec: ScenarioSpec, benchmark: Optional[Benchmark] = None) -> List[RoundResult]:
    return run_rounds(spec, range(spec.params.rounds), benchmark)


def _capacity_order(cap: Capacity):
    return (1, 0) if cap is UNBOUNDED else (0, int(cap))


def expand_grid(
    mp_set: Iterable[Union[int, str]],
    ma_set: Iterable[Union[int, str]],
    sigma_set: Iterable[float],
    constants: ModelParams = ModelParams(),
    base_seed: int = 0,
    benchmark: Optional[Benchmark] = None,
) -> List[ScenarioSpec]:
    """Cartesian scenario grid, m_P outermost, then m_A, then sigma.

    Absolute noise levels are resolved against the benchmark outcome.
    """
    mps = sorted({parse_capacity(v) for v in mp_set}, key=_capacity_order)
    mas = sorted({parse_capacity(v) for v in ma_set}, key=_capacity_order)
    sigmas = sorted({float(s) for s in sigma_set})
    if not (mps and mas and sigmas):
        raise ValueError("grid sets must be non-empty")
    if benchmark is None:
        benchmark = solve_second_best(constants.eta, constants.reservation_utility)
    specs = []
    for mp, ma, sf in itertools.product(mps, mas, sigmas):
        params = replace(constants, memory_principal=mp, memory_agent=ma, sigma_frac=sf, sigma=sf * benchmark.outcome_star)
        specs.append(make_spec(params, base_seed))
    return specs


def resolve_workers(workers: Union[int, str, None]) -> int:
    if workers in (None, "auto"):
        return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
    w = int(workers)
    if w < 1:
        raise ValueError(f"workers must be >= 1 or 'auto', got {workers!r}")
    return w


def map_scenarios(fn, specs: Sequence[ScenarioSpec], workers: Union[int, str, None] = 1) -> list:
    """Apply ``fn`` to every scenario, in order, optionally in a process pool."""
    w = min(resolve_workers(workers), max(1, len(specs)))
    if w == 1:
        return [fn(s) for s in specs]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, specs))
