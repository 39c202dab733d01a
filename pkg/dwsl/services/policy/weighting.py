"""
Distance-reduction advantages and their exponentiated weights.
"""

from typing import Optional

import numpy as np

from dwsl.services.mdp import MdpSpec
from dwsl.utils.errors import InputDomainError

# exp() overflows or underflows to zero beyond this magnitude
_MAX_EXPONENT = 700.0


def step_cost(spec: MdpSpec, next_states, goals, num_bins: int) -> np.ndarray:
    """0 where the next state achieves the goal, 1 / B elsewhere."""
    achieved = spec.goal_map[np.asarray(next_states, dtype=int)] == np.asarray(goals)
    return np.where(achieved, 0.0, 1.0 / num_bins)


def advantage(
    spec: MdpSpec, d_cur, d_next, next_states, goals, num_bins: int
) -> np.ndarray:
    """
    Reduction in estimated distance achieved by a transition.

    adv = d_cur - c - d_next with c = 0 when phi(s_next) = g and 1 / B otherwise.
    """
    cost = step_cost(spec, next_states, goals, num_bins)
    d_cur = np.asarray(d_cur, dtype=np.float64)
    return d_cur - cost - np.asarray(d_next, dtype=np.float64)


def weight(adv, beta: float, clip: Optional[float]) -> np.ndarray:
    """
    min(exp(adv / beta), clip); ``clip=None`` leaves weights unclipped.

    Weights are always positive.
    """
    if beta <= 0:
        raise InputDomainError(f"beta must be positive, got {beta}")
    exponent = np.clip(
        np.asarray(adv, dtype=np.float64) / beta, -_MAX_EXPONENT, _MAX_EXPONENT
    )
    if clip is not None:
        exponent = np.minimum(exponent, np.log(clip))
    result = np.exp(exponent)
    return float(result) if result.ndim == 0 else result
