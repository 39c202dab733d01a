"""
Bias-corrected Adam.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from dwsl.config import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_LEARNING_RATE


@dataclass
class AdamState:
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON
    step: int = 0
    first_moments: List[np.ndarray] = field(default_factory=list)
    second_moments: List[np.ndarray] = field(default_factory=list)


def adam_step(
    state: AdamState, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]
) -> List[np.ndarray]:
    """
    Apply one Adam update.

    The state's step count and moments are advanced in place.

    Returns:
        Updated parameters (new arrays)
    """
    if not state.first_moments:
        state.first_moments = [np.zeros_like(p) for p in params]
        state.second_moments = [np.zeros_like(p) for p in params]
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step

    updated = []
    for index, (p, g) in enumerate(zip(params, grads)):
        m = b1 * state.first_moments[index] + (1.0 - b1) * g
        v = b2 * state.second_moments[index] + (1.0 - b2) * g * g
        state.first_moments[index] = m
        state.second_moments[index] = v
        m_hat = m / correction1
        v_hat = v / correction2
        step = state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
        updated.append(p - step)
    return updated
