"""Per-period decisions of the principal (contract search) and the agent
(acceptance and effort).

The ``*_v`` functions act on whole batches of rounds; ``principal_propose`` and
``agent_respond`` are their single-round views.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .contract import action_bounds_v, best_response_v, premium_for_effort_v
from .model import Contract, agent_utility

INCUMBENT = 2
# slack for candidates that sit exactly on the IC frontier found by bisection
FRONTIER_SLACK = 1e-9


class ProposalBatch(NamedTuple):
    premium: np.ndarray
    incited_effort: np.ndarray
    predicted_outcome: np.ndarray
    predicted_utility: np.ndarray
    candidates: np.ndarray
    feasible: np.ndarray


@dataclass(frozen=True)
class Proposal:
    contract: Contract
    candidates: Tuple[float, float, float]
    predicted_outcome: float
    predicted_utility: float


@dataclass(frozen=True)
class Response:
    accepted: bool
    effort: float
    predicted_utility: float


def candidate_premiums_v(candidates, belief, eta: float) -> np.ndarray:
    rho = premium_for_effort_v(candidates, belief, eta)
    # frontier candidates rejected only by bisection round-off get the full share
    edge = np.isnan(rho) & (np.exp(-eta * (candidates + belief)) >= candidates - FRONTIER_SLACK)
    return np.where(edge, 1.0, rho)


def select_contract_v(candidates, belief, eta: float, reservation_utility: float = 0.0, allowed=None) -> ProposalBatch:
    """Pick the candidate with the highest predicted principal utility.

    ``candidates`` has shape ``(n, 3)`` with the incumbent in the last column.
    Candidates without an IC premium or failing predicted participation are
    dropped. Ties go to the incumbent, then to the smaller effort.
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    n = candidates.shape[0]
    b = np.asarray(belief, dtype=float).reshape(n, 1) * np.ones_like(candidates)
    rho = candidate_premiums_v(candidates, b, eta)
    x_pred = candidates + b
    up_pred = (1.0 - rho) * x_pred
    with np.errstate(invalid="ignore"):
        ua_pred = agent_utility(rho * x_pred, candidates, eta)
        valid = ~np.isnan(rho) & (ua_pred >= reservation_utility)
    if allowed is not None:
        valid &= np.asarray(allowed, dtype=bool).reshape(n, 1)

    score = np.where(valid, up_pred, -np.inf)
    top = score.max(axis=1, keepdims=True)
    tied = valid & (score == top)
    # incumbent first, otherwise the smallest tied effort
    effort_key = np.where(tied, candidates, np.inf)
    choice = np.where(tied[:, INCUMBENT], INCUMBENT, np.argmin(effort_key, axis=1))
    feasible = valid.any(axis=1)

    rows = np.arange(n)
    return ProposalBatch(
        premium=np.where(feasible, rho[rows, choice], np.nan),
        incited_effort=np.where(feasible, candidates[rows, choice], np.nan),
        predicted_outcome=np.where(feasible, x_pred[rows, choice], np.nan),
        predicted_utility=np.where(feasible, up_pred[rows, choice], np.nan),
        candidates=candidates,
        feasible=feasible,
    )


def propose_v(belief, previous_incited, eta: float, reservation_utility: float, draws) -> ProposalBatch:
    """Principal's contract for each round given two uniform draws per round.

    The draws place two fresh candidates uniformly on the feasible interval;
    the previous incited effort, clamped into that interval, is the third.
    """
    belief = np.atleast_1d(np.asarray(belief, dtype=float))
    previous_incited = np.broadcast_to(np.asarray(previous_incited, dtype=float), belief.shape)
    draws = np.asarray(draws, dtype=float).reshape(belief.size, 2)
    lower, upper, bounded = action_bounds_v(belief, eta, reservation_utility)
    lo = np.where(bounded, lower, 0.0)
    span = upper - lo
    candidates = np.column_stack([
        lo + draws[:, 0] * span,
        lo + draws[:, 1] * span,
        np.clip(previous_incited, lo, upper),
    ])
    return select_contract_v(candidates, belief, eta, reservation_utility, allowed=bounded)


def respond_v(premium, belief, eta: float, reservation_utility: float = 0.0):
    """Agent's best response, predicted utility and acceptance for each round.

    Returns ``(effort, predicted_utility, accepted)``; effort is 0 on rejection.
    """
    premium = np.asarray(premium, dtype=float)
    belief = np.asarray(belief, dtype=float)
    a = best_response_v(premium, belief, eta)
    predicted = agent_utility(premium * (a + belief), a, eta)
    accepted = predicted >= reservation_utility
    return np.where(accepted, a, 0.0), predicted, accepted


def principal_propose(
    belief_theta: float,
    previous_incited: float,
    eta: float,
    reservation_utility: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    candidates: Optional[Sequence[float]] = None,
) -> Optional[Proposal]:
    """Single-round contract proposal; ``None`` when no contract can be offered.

    Fresh candidates are drawn with ``rng`` unless ``candidates`` fixes them.
    """
    if candidates is None:
        if rng is None:
            raise ValueError("need a random generator or explicit candidates")
        batch = propose_v([belief_theta], [previous_incited], eta, reservation_utility, rng.random(2))
    else:
        lower, upper, bounded = action_bounds_v(belief_theta, eta, reservation_utility)
        if not bounded[0]:
            return None
        incumbent = min(max(previous_incited, lower[0]), upper[0])
        batch = select_contract_v([[candidates[0], candidates[1], incumbent]], [belief_theta], eta, reservation_utility)
    if not batch.feasible[0]:
        return None
    return Proposal(
        contract=Contract(float(batch.premium[0]), float(batch.incited_effort[0])),
        candidates=tuple(float(c) for c in batch.candidates[0]),
        predicted_outcome=float(batch.predicted_outcome[0]),
        predicted_utility=float(batch.predicted_utility[0]),
    )


def agent_respond(contract: Contract, belief_theta: float, eta: float, reservation_utility: float = 0.0) -> Response:
    effort, predicted, accepted = respond_v(contract.premium, belief_theta, eta, reservation_utility)
    return Response(bool(accepted), float(effort), float(predicted))
