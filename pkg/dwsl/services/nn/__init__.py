"""
Minimal MLP with analytic gradients, Adam and the losses used for training.
"""

from dwsl.services.nn.adam import AdamState, adam_step
from dwsl.services.nn.losses import (
    expectile_loss,
    mse_loss,
    soft_cross_entropy,
    softmax_cross_entropy,
)
from dwsl.services.nn.mlp import (
    Mlp,
    backward,
    flatten_params,
    forward,
    init_mlp,
    mlp_from_record,
    mlp_to_record,
)
from dwsl.services.nn.training import (
    FEATURE_KINDS,
    SCHEDULES,
    FitConfig,
    check_loss,
    learning_rate_at,
    train_network,
)

__all__ = [
    "AdamState",
    "FEATURE_KINDS",
    "FitConfig",
    "Mlp",
    "SCHEDULES",
    "adam_step",
    "backward",
    "check_loss",
    "expectile_loss",
    "flatten_params",
    "forward",
    "init_mlp",
    "learning_rate_at",
    "mlp_from_record",
    "mlp_to_record",
    "mse_loss",
    "soft_cross_entropy",
    "softmax_cross_entropy",
    "train_network",
]
