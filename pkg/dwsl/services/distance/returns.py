"""
Mapping between first-hit distances and sparse-reward returns.
"""

from typing import Optional

import numpy as np

from dwsl.utils.errors import InputDomainError


def distance_to_return(k, gamma: float, horizon: Optional[int] = None):
    """
    Return collected when the goal is first achieved after k transitions.

    For gamma < 1 this is -(1 - gamma^(k-1)) / (1 - gamma); for gamma = 1 it
    is -(k - 1), capped at -horizon when a horizon is given.

    Args:
        k: Distance (scalar or integer array), at least 1
        gamma: Discount in (0, 1]
        horizon: Remaining horizon for the undiscounted case
    """
    if not 0.0 < gamma <= 1.0:
        raise InputDomainError(f"gamma must lie in (0, 1], got {gamma}")
    k_arr = np.asarray(k)
    if np.any(k_arr < 1):
        raise InputDomainError("distance k must be at least 1")
    if gamma == 1.0:
        steps = k_arr - 1
        if horizon is not None:
            steps = np.minimum(steps, horizon)
        returns = -steps.astype(np.float64)
    else:
        returns = -(1.0 - gamma ** (k_arr - 1.0)) / (1.0 - gamma)
    return float(returns) if returns.ndim == 0 else returns
