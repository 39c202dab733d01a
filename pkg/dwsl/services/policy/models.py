"""
Goal-conditioned stochastic policies and action selection.
"""

from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np
from scipy.special import softmax

from dwsl.services.mdp import MdpSpec, pair_features
from dwsl.services.nn import Mlp, forward
from dwsl.utils.errors import InputDomainError

ACT_MODES = ("greedy", "sample")


class PolicyModel(ABC):
    """pi(a | s, g) over an MdpSpec's actions."""

    backend: str = ""

    def __init__(self, spec: MdpSpec, training_fallbacks: int = 0):
        self.spec = spec
        self.training_fallbacks = int(training_fallbacks)

    @abstractmethod
    def action_probs(
        self, states: np.ndarray, goals: np.ndarray, t: int = 0
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Action distributions for (state, goal) pairs at time t.

        Returns:
            (probs (n, A), supported (n,))
        """


class TabularPolicy(PolicyModel):
    """
    Table of action distributions.

    ``probs`` is (S, G, A) for a stationary policy or (H, S, G, A) for a
    time-indexed one; rows with support False carry no information.
    """

    backend = "tabular"

    def __init__(
        self,
        spec: MdpSpec,
        probs: np.ndarray,
        support: np.ndarray,
        training_fallbacks: int = 0,
    ):
        super().__init__(spec, training_fallbacks)
        if probs.shape[-3:] != (spec.num_states, spec.goal_count, spec.num_actions):
            raise InputDomainError(
                f"policy table shape {probs.shape} does not fit the MDP"
            )
        if support.shape != probs.shape[:-1]:
            raise InputDomainError("support mask does not match the policy table")
        self.probs = probs
        self.support = support

    @property
    def time_indexed(self) -> bool:
        return self.probs.ndim == 4

    def action_probs(self, states, goals, t=0):
        states = np.asarray(states, dtype=int)
        goals = np.asarray(goals, dtype=int)
        if self.time_indexed:
            t = min(int(t), self.probs.shape[0] - 1)
            return self.probs[t, states, goals], self.support[t, states, goals]
        return self.probs[states, goals], self.support[states, goals]


class MlpPolicy(PolicyModel):
    """MLP softmax head over state and goal features; supported everywhere."""

    backend = "mlp"

    def __init__(
        self, spec: MdpSpec, net: Mlp, features: str, training_fallbacks: int = 0
    ):
        super().__init__(spec, training_fallbacks)
        self.net = net
        self.features = features

    def action_probs(self, states, goals, t=0):
        x = pair_features(self.spec, states, goals, self.features)
        probs = softmax(forward(self.net, x), axis=1)
        return probs, np.ones(len(probs), dtype=bool)


def act(
    policy: PolicyModel,
    s: int,
    g: int,
    mode: str,
    rng: np.random.Generator,
    t: int = 0,
) -> Tuple[int, bool]:
    """
    Select an action.

    Greedy picks the most probable action with the lowest id on ties; sample
    draws from the distribution. An unsupported (s, g) falls back to the
    uniform distribution.

    Returns:
        (action, used_fallback)
    """
    if mode not in ACT_MODES:
        raise InputDomainError(f"unknown action mode '{mode}'")
    spec = policy.spec
    probs, supported = policy.action_probs(
        np.array([spec.check_state(s)]), np.array([spec.check_goal(g)]), t
    )
    row = probs[0]
    fallback = not bool(supported[0])
    if fallback:
        row = np.full(spec.num_actions, 1.0 / spec.num_actions)
    if mode == "greedy":
        return int(np.argmax(row)), fallback
    return int(rng.choice(spec.num_actions, p=row / row.sum())), fallback
