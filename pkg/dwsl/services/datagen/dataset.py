"""
Offline dataset types: trajectories, headers and the dataset container.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Tuple

import numpy as np

from dwsl.config import DATASET_FORMAT_VERSION
from dwsl.services.mdp import MdpSpec
from dwsl.utils.errors import InputDomainError


@dataclass(frozen=True)
class Trajectory:
    """One episode: T + 1 states and the T actions between them."""

    states: Tuple[int, ...]
    actions: Tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class DatasetHeader:
    """First record of a dataset file."""

    env_id: str
    horizon: int
    num_trajectories: int
    behavior: str
    seed: int
    goal_map: str = "identity"
    format_version: int = DATASET_FORMAT_VERSION
    config: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A collection of trajectories together with the environment they replay in.

    Commanded goals are never part of a dataset.
    """

    spec: MdpSpec
    header: DatasetHeader
    trajectories: Tuple[Trajectory, ...]

    def __post_init__(self):
        if not self.trajectories:
            raise InputDomainError("a dataset needs at least one trajectory")

    def __len__(self) -> int:
        return len(self.trajectories)

    @cached_property
    def lengths(self) -> np.ndarray:
        """Number of actions in every trajectory."""
        return np.array([t.horizon for t in self.trajectories], dtype=int)

    @cached_property
    def state_matrix(self) -> np.ndarray:
        """States padded with their last value to shape (n, max_T + 1)."""
        width = int(self.lengths.max()) + 1
        matrix = np.zeros((len(self), width), dtype=int)
        for row, traj in enumerate(self.trajectories):
            matrix[row, : len(traj.states)] = traj.states
            matrix[row, len(traj.states) :] = traj.states[-1]
        return matrix

    @cached_property
    def action_matrix(self) -> np.ndarray:
        """Actions padded with zeros to shape (n, max_T)."""
        width = int(self.lengths.max())
        matrix = np.zeros((len(self), width), dtype=int)
        for row, traj in enumerate(self.trajectories):
            matrix[row, : len(traj.actions)] = traj.actions
        return matrix

    def visited_states(self) -> np.ndarray:
        """Every state occurrence in the dataset, trajectory by trajectory."""
        return np.concatenate([np.asarray(t.states) for t in self.trajectories])


def validate_trajectory(spec: MdpSpec, trajectory: Trajectory) -> None:
    """
    Check that a trajectory replays exactly under the environment dynamics.

    Raises:
        InputDomainError: On length mismatch, invalid ids or a broken transition
    """
    if len(trajectory.states) != len(trajectory.actions) + 1:
        raise InputDomainError(
            f"trajectory has {len(trajectory.states)} states and "
            f"{len(trajectory.actions)} actions"
        )
    for s in trajectory.states:
        spec.check_state(s)
    for t, a in enumerate(trajectory.actions):
        spec.check_action(a)
        expected = int(spec.transitions[trajectory.states[t], a])
        if trajectory.states[t + 1] != expected:
            raise InputDomainError(
                f"transition {t} does not replay: f({trajectory.states[t]}, {a}) = "
                f"{expected}, recorded {trajectory.states[t + 1]}"
            )
