"""
Return statistics of offline datasets.
"""

from typing import Dict

import numpy as np
import pandas as pd

from dwsl.services.datagen.dataset import Dataset


def trajectory_returns(dataset: Dataset, goal: int) -> pd.Series:
    """Per-trajectory count of timesteps t with phi(s_{t+1}) == goal."""
    goal = dataset.spec.check_goal(goal)
    phi = dataset.spec.goal_map
    counts = [
        int(np.count_nonzero(phi[np.asarray(traj.states[1:])] == goal))
        for traj in dataset.trajectories
    ]
    return pd.Series(counts, name="return", dtype=float)


def dataset_stats(dataset: Dataset, goal: int) -> Dict[str, float]:
    """
    Summarise per-trajectory returns for one goal.

    Returns:
        Dictionary with mean, median, p75 and p90
    """
    returns = trajectory_returns(dataset, goal)
    return {
        "mean": float(returns.mean()),
        "median": float(returns.median()),
        "p75": float(returns.quantile(0.75)),
        "p90": float(returns.quantile(0.90)),
    }


def most_frequent_final_goal(dataset: Dataset) -> int:
    """Goal most often achieved by a trajectory's last state (lowest id on ties)."""
    finals = pd.Series(
        [int(dataset.spec.goal_map[traj.states[-1]]) for traj in dataset.trajectories]
    )
    counts = finals.value_counts()
    return int(counts[counts == counts.max()].index.min())
