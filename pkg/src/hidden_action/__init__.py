"""Agent-based hidden-action model with memory-limited principal and agent."""

__version__ = "0.1.0"

from .contract import (
    ActionBounds,
    action_bounds,
    best_response,
    premium_for_effort,
    solve_second_best,
)
from .decision import Proposal, Response, agent_respond, principal_propose
from .engine import RoundResult, ScenarioSpec, expand_grid, run_round, run_scenario
from .learning import MemoryBuffer, estimate_exogenous, learned_expectation, observe_exogenous, remember
from .model import (
    UNBOUNDED,
    Benchmark,
    Contract,
    ModelParams,
    StepRecord,
    agent_utility,
    outcome,
    principal_utility,
)
from .stats import (
    NormalizedSeries,
    cv_stabilization,
    euclidean_distance,
    normalize_series,
    significance_test,
)
