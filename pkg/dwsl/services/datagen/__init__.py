"""
Behavior policies, offline dataset collection and dataset files.
"""

from dwsl.services.datagen.behavior import (
    BEHAVIOR_KINDS,
    BehaviorPolicy,
    make_behavior_policy,
    parse_behavior,
)
from dwsl.services.datagen.collection import (
    TaskFamily,
    collect_dataset,
    make_dataset,
    rollout_behavior,
)
from dwsl.services.datagen.dataset import (
    Dataset,
    DatasetHeader,
    Trajectory,
    validate_trajectory,
)
from dwsl.services.datagen.dataset_io import read_dataset, write_dataset
from dwsl.services.datagen.statistics import (
    dataset_stats,
    most_frequent_final_goal,
    trajectory_returns,
)

__all__ = [
    "BEHAVIOR_KINDS",
    "BehaviorPolicy",
    "Dataset",
    "DatasetHeader",
    "TaskFamily",
    "Trajectory",
    "collect_dataset",
    "dataset_stats",
    "make_behavior_policy",
    "make_dataset",
    "most_frequent_final_goal",
    "parse_behavior",
    "read_dataset",
    "rollout_behavior",
    "trajectory_returns",
    "validate_trajectory",
]
