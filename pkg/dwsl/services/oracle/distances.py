"""
Exact first-hit distance distributions of a relabeling policy.
"""

from typing import Optional

import numpy as np
from scipy.special import logsumexp

from dwsl.services.distance import (
    CategoricalDistance,
    TabularDistanceModel,
    distance_to_return,
)
from dwsl.services.mdp import MdpSpec
from dwsl.services.oracle.behavior import EmpiricalBehavior
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import InputDomainError


def first_hit_distribution(
    spec: MdpSpec, behavior: EmpiricalBehavior, s: int, g: int, remaining: int
) -> CategoricalDistance:
    """
    Distribution of the first k >= 1 with phi(s_k) = g under pi_r from s.

    Entry k - 1 holds P(k) for k <= remaining; entry ``remaining`` holds the
    probability of never achieving g within the remaining steps (k =
    remaining + 1). Mass entering an unsupported row is lost.
    """
    s, g = spec.check_state(s), spec.check_goal(g)
    if remaining < 0:
        raise InputDomainError("remaining horizon must be non-negative")
    probs = np.zeros(remaining + 1)
    mass = np.zeros(spec.num_states)
    mass[s] = 1.0
    policy = np.where(behavior.support[:, g, None], behavior.probs[:, g, :], 0.0)
    achieved = spec.goal_map[spec.transitions] == g
    for k in range(1, remaining + 1):
        flow = mass[:, None] * policy
        probs[k - 1] = flow[achieved].sum()
        mass = np.bincount(
            spec.transitions[~achieved],
            weights=flow[~achieved],
            minlength=spec.num_states,
        )
    probs[remaining] = mass.sum()
    return CategoricalDistance(probs=probs, support=probs > 0)


def first_hit_tables(
    spec: MdpSpec, behavior: EmpiricalBehavior, max_remaining: int
) -> np.ndarray:
    """
    First-hit distributions of every (state, goal) for every remaining horizon.

    Returns:
        Array (max_remaining + 1, S, G, max_remaining + 1) whose slice h holds,
        at index k - 1, the probability of first achieving g after k steps, and
        at index h the probability of not achieving it within h steps
    """
    S, G, K = spec.num_states, spec.goal_count, max_remaining + 1
    policy = np.where(behavior.support[:, :, None], behavior.probs, 0.0)
    achieved = spec.goal_achieved[spec.transitions].transpose(0, 2, 1)
    stay = policy * achieved
    move = policy * ~achieved
    tables = np.zeros((K, S, G, K))
    tables[0, :, :, 0] = 1.0
    for h in range(1, K):
        following = tables[h - 1][spec.transitions].transpose(0, 2, 1, 3)
        tables[h, :, :, 0] = stay.sum(axis=2)
        tables[h, :, :, 1:] = np.einsum("sga,sgak->sgk", move, following[..., :-1])
    return tables


def exact_distance_model(
    spec: MdpSpec,
    behavior: EmpiricalBehavior,
    remaining: int,
    num_bins: Optional[int] = None,
    tables: Optional[np.ndarray] = None,
) -> TabularDistanceModel:
    """
    Tabular distance model holding the exact first-hit distributions.

    Bins are single steps (N = 1); ``num_bins`` must cover remaining + 1.
    With nothing left to do (remaining = 0) every pair is a point mass at k = 1.
    """
    num_bins = num_bins or remaining + 1
    if num_bins < remaining + 1:
        raise InputDomainError(
            f"{num_bins} bins cannot hold distances up to {remaining + 1}"
        )
    if tables is None or tables.shape[0] <= remaining:
        tables = first_hit_tables(spec, behavior, remaining)
    slice_ = tables[remaining, :, :, : remaining + 1]
    probs = np.zeros((spec.num_states, spec.goal_count, num_bins))
    probs[:, :, : remaining + 1] = slice_
    support = probs.sum(axis=2) > 0
    return TabularDistanceModel(spec, BinningConfig(1, num_bins), probs, support)


def distance_soft_value(
    distribution: CategoricalDistance,
    alpha: float,
    gamma: float,
    horizon: Optional[int] = None,
) -> float:
    """
    alpha * log sum_k p(k) exp(R_k / alpha) with entry b standing for k = b + 1.

    R_k comes from distance_to_return; ``horizon`` caps the undiscounted return.
    """
    if alpha <= 0:
        raise InputDomainError(f"alpha must be positive, got {alpha}")
    k = np.arange(1, distribution.num_bins + 1)
    returns = distance_to_return(k, gamma, horizon)
    return float(alpha * logsumexp(np.asarray(returns) / alpha, b=distribution.probs))
