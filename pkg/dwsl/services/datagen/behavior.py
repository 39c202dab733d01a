"""
Scripted behavior policies used to collect offline datasets.
"""

from dataclasses import dataclass

import numpy as np

from dwsl.services.mdp import MdpSpec, UNREACHABLE, optimal_action_table
from dwsl.utils.errors import InputDomainError

BEHAVIOR_KINDS = ("random", "noisy_expert", "mixture")


@dataclass(frozen=True)
class BehaviorPolicy:
    """
    An episode-level behavior policy.

    ``random`` acts uniformly. ``noisy_expert`` takes the shortest-path action
    toward the episode's commanded goal with probability 1 - epsilon and a
    uniform action otherwise. Once the goal is achieved it takes the
    stationary action without noise. ``mixture`` runs a fraction ``rho`` of
    the episodes as random and the rest as noisy expert.
    """

    kind: str
    epsilon: float = 0.0
    rho: float = 0.0
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "random":
            return "random"
        if self.kind == "noisy_expert":
            return f"noisy_expert:{self.epsilon!r}"
        return f"mixture:{self.rho!r}:{self.epsilon!r}"

    def random_episodes(self, num_episodes: int) -> np.ndarray:
        """
        Which episodes are run by the uniform policy.

        The count is exactly round(rho * num_episodes) for a mixture; which
        episodes are chosen is fixed by the policy seed.
        """
        flags = np.zeros(num_episodes, dtype=bool)
        if self.kind == "random":
            flags[:] = True
        elif self.kind == "mixture":
            count = int(round(self.rho * num_episodes))
            order = np.random.default_rng(self.seed).permutation(num_episodes)
            flags[order[:count]] = True
        return flags

    def action_probs(
        self, spec: MdpSpec, s: int, goal: int, random_episode: bool = False
    ) -> np.ndarray:
        """
        Action distribution at state s for commanded goal ``goal``.

        Args:
            spec: The environment
            s: Current state
            goal: Commanded goal of the episode
            random_episode: Whether the episode is run by the uniform policy

        Returns:
            Probability vector over actions
        """
        A = spec.num_actions
        uniform = np.full(A, 1.0 / A)
        if self.kind == "random" or random_episode:
            return uniform
        expert = int(optimal_action_table(spec)[s, goal])
        if expert == UNREACHABLE:
            return uniform
        if spec.goal_map[s] == goal:
            probs = np.zeros(A)
            probs[expert] = 1.0
            return probs
        probs = self.epsilon * uniform
        probs[expert] += 1.0 - self.epsilon
        return probs


def make_behavior_policy(
    spec: MdpSpec,
    kind: str,
    seed: int = 0,
    epsilon: float = 0.0,
    rho: float = 0.0,
) -> BehaviorPolicy:
    """
    Build a behavior policy after validating its parameters.

    Args:
        spec: The environment the policy will act in
        kind: 'random', 'noisy_expert' or 'mixture'
        seed: Seed fixing the mixture's episode assignment
        epsilon: Uniform-action probability of the noisy expert
        rho: Fraction of random episodes in a mixture

    Returns:
        The behavior policy
    """
    if kind not in BEHAVIOR_KINDS:
        raise InputDomainError(
            f"unknown behavior '{kind}'; expected one of {', '.join(BEHAVIOR_KINDS)}"
        )
    if not 0.0 <= epsilon <= 1.0:
        raise InputDomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not 0.0 <= rho <= 1.0:
        raise InputDomainError(f"rho must lie in [0, 1], got {rho}")
    if spec.num_actions < 1:
        raise InputDomainError("environment has no actions")
    return BehaviorPolicy(kind=kind, epsilon=float(epsilon), rho=float(rho), seed=seed)


def parse_behavior(spec: MdpSpec, descriptor: str, seed: int = 0) -> BehaviorPolicy:
    """
    Parse a behavior descriptor.

    Accepted forms are 'random', 'noisy_expert:<eps>' and 'mixture:<rho>:<eps>'.
    """
    kind, *params = descriptor.strip().split(":")
    try:
        values = [float(p) for p in params]
    except ValueError as e:
        raise InputDomainError(f"malformed behavior descriptor '{descriptor}'") from e
    if kind == "random" and not values:
        return make_behavior_policy(spec, kind, seed=seed)
    if kind == "noisy_expert" and len(values) == 1:
        return make_behavior_policy(spec, kind, seed=seed, epsilon=values[0])
    if kind == "mixture" and len(values) == 2:
        return make_behavior_policy(
            spec, kind, seed=seed, rho=values[0], epsilon=values[1]
        )
    raise InputDomainError(f"malformed behavior descriptor '{descriptor}'")
