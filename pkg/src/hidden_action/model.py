"""Domain types and the pure payoff functions of the hidden-action model.

Production is additive (outcome = effort + exogenous factor), the contract is a
pure output share, the principal is risk neutral and the agent has CARA utility
over compensation with quadratic effort cost.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np


class Unbounded(enum.Enum):
    """Memory with no capacity limit (spelled ``"inf"`` in config files)."""

    INF = "inf"

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded.INF

Capacity = Union[int, Unbounded]


def parse_capacity(value) -> Capacity:
    """Accept ``"inf"``/``UNBOUNDED`` or a positive integer."""
    if value is UNBOUNDED or (isinstance(value, str) and value.strip().lower() == "inf"):
        return UNBOUNDED
    if isinstance(value, bool):
        raise ValueError(f"memory capacity must be a positive integer or 'inf', got {value!r}")
    if isinstance(value, float) and math.isinf(value):
        return UNBOUNDED
    try:
        cap = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"memory capacity must be a positive integer or 'inf', got {value!r}") from None
    if cap != value and not isinstance(value, str):
        raise ValueError(f"memory capacity must be an integer, got {value!r}")
    if cap < 1:
        raise ValueError(f"memory capacity must be >= 1, got {value!r}")
    return cap


def format_capacity(cap: Capacity) -> str:
    return "inf" if cap is UNBOUNDED else str(int(cap))


@dataclass(frozen=True)
class ModelParams:
    eta: float = 0.5
    mu: float = 0.0
    sigma_frac: float = 0.05
    sigma: float = 0.0
    memory_principal: Capacity = 1
    memory_agent: Capacity = 1
    timesteps: int = 20
    rounds: int = 700
    reservation_utility: float = 0.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not self.sigma_frac >= 0:
            raise ValueError(f"sigma_frac must be >= 0, got {self.sigma_frac}")
        if self.timesteps < 1:
            raise ValueError(f"timesteps must be >= 1, got {self.timesteps}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        object.__setattr__(self, "memory_principal", parse_capacity(self.memory_principal))
        object.__setattr__(self, "memory_agent", parse_capacity(self.memory_agent))


@dataclass(frozen=True)
class Contract:
    premium: float
    incited_effort: float

    def __post_init__(self):
        if not 0.0 <= self.premium <= 1.0:
            raise ValueError(f"premium must lie in [0, 1], got {self.premium}")
        if not self.incited_effort >= 0.0:
            raise ValueError(f"incited effort must be non-negative, got {self.incited_effort}")


@dataclass(frozen=True)
class StepRecord:
    t: int
    effort: float
    theta: float
    outcome: float
    compensation: float
    utility_principal: float
    utility_agent: float
    accepted: bool
    premium: float
    incited_effort: float
    belief_principal: float
    belief_agent: float


@dataclass(frozen=True)
class Benchmark:
    """Second-best contract used as the normalization point."""

    premium_star: float
    effort_star: float
    outcome_star: float
    utility_principal_star: float
    utility_agent_star: float
    eta: float = 0.5

    def divisor(self, metric: str) -> float:
        return {
            "premium": self.premium_star,
            "effort": self.effort_star,
            "utility_principal": self.utility_principal_star,
            "utility_agent": self.utility_agent_star,
        }[metric]


def outcome(effort, theta):
    return effort + theta


def compensation(outcome_value, premium):
    return outcome_value * premium


def _check_premium(premium):
    p = np.asarray(premium)
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise ValueError(f"premium must lie in [0, 1], got {premium}")


def principal_utility(outcome_value, premium):
    _check_premium(premium)
    return outcome_value * (1.0 - premium)


def agent_utility(compensation_value, effort, eta):
    """CARA utility of compensation minus quadratic effort cost.

    Works elementwise on arrays. ``expm1`` keeps the small-``eta`` limit
    (``s - a**2 / 2``) accurate.
    """
    if np.any(np.asarray(eta) <= 0):
        raise ValueError(f"eta must be > 0, got {eta}")
    return -np.expm1(-eta * compensation_value) / eta - 0.5 * effort * effort
