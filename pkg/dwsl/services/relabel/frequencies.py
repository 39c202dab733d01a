"""
Relabeled action frequencies, the empirical relabeling policy.
"""

from typing import Optional, Tuple

import numpy as np

from dwsl.services.datagen import Dataset
from dwsl.services.relabel.binning import BinningConfig
from dwsl.services.relabel.sampler import RelabelBatch, enumerate_all_pairs


def action_frequencies(
    dataset: Dataset,
    goal_conditioned: bool = True,
    pairs: Optional[RelabelBatch] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sampler-law weighted action frequencies per (state, goal).

    With ``goal_conditioned=False`` the frequencies are pooled per state and
    repeated for every goal; a state is then supported for all goals once it
    has a recorded action.

    Returns:
        (probs (S, G, A), support (S, G))
    """
    spec = dataset.spec
    if pairs is None:
        pairs = enumerate_all_pairs(
            dataset, BinningConfig.for_horizon(int(dataset.lengths.max()))
        )
    S, G, A = spec.num_states, spec.goal_count, spec.num_actions
    if goal_conditioned:
        mass = np.zeros((S, G, A))
        np.add.at(mass, (pairs.states, pairs.goals, pairs.actions), pairs.weights)
    else:
        pooled = np.zeros((S, A))
        np.add.at(pooled, (pairs.states, pairs.actions), pairs.weights)
        mass = np.repeat(pooled[:, None, :], G, axis=1)
    totals = mass.sum(axis=2)
    support = totals > 0
    probs = np.zeros_like(mass)
    probs[support] = mass[support] / totals[support][:, None]
    return probs, support
