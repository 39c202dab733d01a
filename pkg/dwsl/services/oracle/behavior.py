"""
Relabeling policies pi_r: estimated from data or given analytically.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from dwsl.services.datagen import Dataset
from dwsl.services.mdp import MdpSpec
from dwsl.services.relabel import BinningConfig, action_frequencies, enumerate_all_pairs


@dataclass(frozen=True, eq=False)
class EmpiricalBehavior:
    """pi_r(a | s, g) as an array (S, G, A) with a support mask (S, G)."""

    probs: np.ndarray
    support: np.ndarray

    def row(self, s: int, g: int) -> Optional[np.ndarray]:
        return self.probs[s, g] if self.support[s, g] else None


def estimate_behavior(
    dataset: Dataset,
    cfg: Optional[BinningConfig] = None,
    goal_conditioned: bool = True,
) -> EmpiricalBehavior:
    """
    Sampler-law weighted relabeled action frequencies.

    Args:
        dataset: Offline dataset
        cfg: Binning used to enumerate pairs (does not affect the frequencies)
        goal_conditioned: Pool frequencies per state across goals when False

    Returns:
        The empirical relabeling policy
    """
    pairs = enumerate_all_pairs(dataset, cfg) if cfg is not None else None
    probs, support = action_frequencies(dataset, goal_conditioned, pairs)
    return EmpiricalBehavior(probs=probs, support=support)


def uniform_behavior(spec: MdpSpec) -> EmpiricalBehavior:
    """Uniform over all actions for every (state, goal)."""
    A = spec.num_actions
    probs = np.full((spec.num_states, spec.goal_count, A), 1.0 / A)
    support = np.ones((spec.num_states, spec.goal_count), dtype=bool)
    return EmpiricalBehavior(probs, support)


def goal_persistent_behavior(spec: MdpSpec) -> EmpiricalBehavior:
    """Uniform over actions away from the goal, the stationary action once achieved."""
    behavior = uniform_behavior(spec)
    probs = behavior.probs.copy()
    states = np.arange(spec.num_states)
    at_goal = spec.goal_map
    probs[states, at_goal] = 0.0
    probs[states, at_goal, spec.stationary_actions] = 1.0
    return EmpiricalBehavior(probs, behavior.support)


def complete_at_goal(spec: MdpSpec, behavior: EmpiricalBehavior) -> EmpiricalBehavior:
    """Give unsupported goal-achieving rows the stationary action."""
    probs = behavior.probs.copy()
    support = behavior.support.copy()
    states = np.arange(spec.num_states)
    goals = spec.goal_map
    missing = ~support[states, goals]
    probs[states[missing], goals[missing]] = 0.0
    probs[states[missing], goals[missing], spec.stationary_actions[missing]] = 1.0
    support[states[missing], goals[missing]] = True
    return EmpiricalBehavior(probs, support)


def behavior_is_goal_persistent(spec: MdpSpec, behavior: EmpiricalBehavior) -> bool:
    """Every supported goal-achieving row only takes self-loop actions."""
    states = np.arange(spec.num_states)
    goals = spec.goal_map
    rows = behavior.probs[states, goals]
    moves = spec.transitions != states[:, None]
    leaking = np.any((rows > 0) & moves, axis=1) & behavior.support[states, goals]
    return not bool(np.any(leaking))


def dataset_goal_persistence(dataset: Dataset) -> Tuple[bool, str]:
    """
    Check that a dataset never leaves a goal it achieves again later.

    For every t, if phi(s_t) reappears at some later time then a_t must keep
    the state unchanged.

    Returns:
        (persistent, reason for the first violation or an empty string)
    """
    phi = dataset.spec.goal_map
    for index, traj in enumerate(dataset.trajectories):
        goals = phi[np.asarray(traj.states)]
        for t in range(traj.horizon):
            moved = traj.states[t + 1] != traj.states[t]
            if moved and np.any(goals[t + 1 :] == goals[t]):
                return False, (
                    f"trajectory {index} leaves goal {int(goals[t])} at step {t} "
                    "and achieves it again later"
                )
    return True, ""
