"""
Advantage weighting, weighted imitation (DWSL, GCSL, AWR variant) and
bootstrapped distances.
"""

from dwsl.services.policy.bootstrap import (
    bootstrap_targets,
    polyak_update,
    shift_distribution,
    train_dwsl_b,
)
from dwsl.services.policy.checkpoints import load_policy, policy_record, save_policy
from dwsl.services.policy.config import TrainConfig
from dwsl.services.policy.models import (
    ACT_MODES,
    MlpPolicy,
    PolicyModel,
    TabularPolicy,
    act,
)
from dwsl.services.policy.pipeline import ALGORITHMS, fit_distance_model, run_algorithm
from dwsl.services.policy.training import (
    POLICY_BACKENDS,
    extract_tabular_policy,
    train_awr_variant,
    train_dwsl,
    train_gcsl,
    train_weighted_policy,
    transition_weights,
)
from dwsl.services.policy.weighting import advantage, step_cost, weight

__all__ = [
    "ACT_MODES",
    "ALGORITHMS",
    "MlpPolicy",
    "POLICY_BACKENDS",
    "PolicyModel",
    "TabularPolicy",
    "TrainConfig",
    "act",
    "advantage",
    "bootstrap_targets",
    "extract_tabular_policy",
    "fit_distance_model",
    "load_policy",
    "policy_record",
    "polyak_update",
    "run_algorithm",
    "save_policy",
    "shift_distribution",
    "step_cost",
    "train_awr_variant",
    "train_dwsl",
    "train_dwsl_b",
    "train_gcsl",
    "train_weighted_policy",
    "transition_weights",
    "weight",
]
