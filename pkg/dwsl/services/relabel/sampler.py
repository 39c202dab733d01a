"""
Hindsight relabeling.

A relabeled sample picks a trajectory uniformly, a time i uniformly in
[0, T - 1] and a future time j uniformly in [i + 1, T], then commands the goal
phi(s_j) at s_i. Under this scheme P(i, j | trajectory) = 1/T * 1/(T - i).
"""

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from dwsl.services.datagen import Dataset
from dwsl.services.relabel.binning import BinningConfig, bin_index
from dwsl.utils.errors import InputDomainError


@dataclass(frozen=True)
class RelabeledSample:
    state: int
    action: int
    next_state: int
    goal: int
    k: int
    bin: int


@dataclass(frozen=True)
class RelabelBatch:
    """
    Columnar relabeled samples.

    ``weights`` is the sampler-law probability of each row when the batch is
    an exhaustive enumeration, and all ones for a sampled batch.
    """

    trajectory: np.ndarray
    i: np.ndarray
    j: np.ndarray
    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    goals: np.ndarray
    k: np.ndarray
    bins: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[RelabeledSample]:
        for row in range(len(self)):
            yield RelabeledSample(
                state=int(self.states[row]),
                action=int(self.actions[row]),
                next_state=int(self.next_states[row]),
                goal=int(self.goals[row]),
                k=int(self.k[row]),
                bin=int(self.bins[row]),
            )


def _check(dataset: Dataset) -> None:
    if dataset is None or len(dataset) == 0:
        raise InputDomainError("cannot relabel an empty dataset")
    if np.any(dataset.lengths < 1):
        raise InputDomainError("every trajectory needs at least one transition")


def _build(
    dataset: Dataset,
    cfg: BinningConfig,
    traj: np.ndarray,
    i: np.ndarray,
    j: np.ndarray,
    weights: np.ndarray,
) -> RelabelBatch:
    matrix = dataset.state_matrix
    phi = dataset.spec.goal_map
    states = matrix[traj, i]
    next_states = matrix[traj, i + 1]
    goals = phi[matrix[traj, j]]
    k = j - i
    if cfg.achieved_as_one:
        k = np.where(phi[next_states] == goals, 1, k)
    return RelabelBatch(
        trajectory=traj,
        i=i,
        j=j,
        states=states,
        actions=dataset.action_matrix[traj, i],
        next_states=next_states,
        goals=goals,
        k=k,
        bins=bin_index(k, cfg) if len(k) else k,
        weights=weights,
    )


def sample_batch(
    dataset: Dataset, cfg: BinningConfig, batch_size: int, rng: np.random.Generator
) -> RelabelBatch:
    """Draw ``batch_size`` relabeled samples with the two-stage uniform scheme."""
    _check(dataset)
    lengths = dataset.lengths
    traj = rng.integers(len(dataset), size=batch_size)
    T = lengths[traj]
    i = rng.integers(0, T)
    j = rng.integers(i + 1, T + 1)
    return _build(dataset, cfg, traj, i, j, np.ones(batch_size))


def sample_relabeled(
    dataset: Dataset, cfg: BinningConfig, rng: np.random.Generator
) -> RelabeledSample:
    """
    Draw one relabeled sample.

    Args:
        dataset: Offline dataset
        cfg: Distance binning
        rng: Caller-owned random stream

    Returns:
        RelabeledSample with goal = phi(s_j) and k = j - i
    """
    return next(iter(sample_batch(dataset, cfg, 1, rng)))


def enumerate_all_pairs(dataset: Dataset, cfg: BinningConfig) -> RelabelBatch:
    """
    Every (trajectory, i, j) with i < j, weighted by the sampler's law.

    The weight of a row is 1/n * 1/T * 1/(T - i) for n trajectories, so the
    weights sum to 1.
    """
    _check(dataset)
    n = len(dataset)
    parts = []
    for index, T in enumerate(dataset.lengths):
        i, j = np.triu_indices(int(T) + 1, k=1)
        weights = 1.0 / (n * T * (T - i))
        parts.append((np.full(len(i), index), i, j, weights))
    traj, i, j, weights = (np.concatenate(cols) for cols in zip(*parts))
    return _build(dataset, cfg, traj, i, j, weights)
