"""
DWSL engine.

Offline goal-conditioned policy learning from relabeled trajectories:
categorical distance models, soft-minimum distance estimates and
advantage-weighted imitation, together with exact tabular oracles that
verify the method's value and policy identities.
"""

# Re-export the main entry points from the package root
from dwsl.services.datagen import collect_dataset, read_dataset, write_dataset
from dwsl.services.distance import fit_tabular, train_classifier
from dwsl.services.evaluation import aggregate_reports, emit_curves, evaluate
from dwsl.services.mdp import make_env
from dwsl.services.oracle import (
    optimal_kl_policy,
    soft_value_iteration,
    verify_suite,
)
from dwsl.services.policy import TrainConfig, run_algorithm
from dwsl.services.relabel import BinningConfig

__all__ = [
    # Environments and data
    "make_env",
    "collect_dataset",
    "read_dataset",
    "write_dataset",
    # Training
    "BinningConfig",
    "TrainConfig",
    "fit_tabular",
    "train_classifier",
    "run_algorithm",
    # Evaluation
    "evaluate",
    "aggregate_reports",
    "emit_curves",
    # Oracles
    "soft_value_iteration",
    "optimal_kl_policy",
    "verify_suite",
]
