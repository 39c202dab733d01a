"""
Minibatch training loop shared by the distance and policy networks.
"""

import math
from typing import Any, Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from dwsl.config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_HIDDEN_SIZES,
    DEFAULT_LEARNING_RATE,
    DEFAULT_TRAIN_STEPS,
)
from dwsl.services.nn.adam import AdamState, adam_step
from dwsl.services.nn.mlp import Mlp, backward, forward
from dwsl.utils.errors import TrainingDivergenceError
from dwsl.utils.logging import logger

FEATURE_KINDS = ("coordinates", "onehot")
SCHEDULES = ("constant", "cosine")

BatchFn = Callable[[np.random.Generator], Tuple[np.ndarray, Any]]
LossFn = Callable[[np.ndarray, Any], Tuple[float, np.ndarray]]
Callback = Callable[[int, Mlp], None]


class FitConfig(BaseModel):
    """Optimisation settings for network training."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    steps: int = Field(DEFAULT_TRAIN_STEPS, ge=0)
    batch_size: int = Field(DEFAULT_BATCH_SIZE, ge=1)
    learning_rate: float = Field(DEFAULT_LEARNING_RATE, gt=0)
    seed: int = 0
    hidden_sizes: Tuple[int, ...] = DEFAULT_HIDDEN_SIZES
    features: str = "coordinates"
    schedule: str = "constant"
    progress: bool = False

    @field_validator("hidden_sizes")
    @classmethod
    def _positive_sizes(cls, value):
        if any(size < 1 for size in value):
            raise ValueError("hidden layer sizes must be positive")
        return tuple(value)

    @field_validator("features")
    @classmethod
    def _known_features(cls, value):
        if value not in FEATURE_KINDS:
            raise ValueError(f"features must be one of {', '.join(FEATURE_KINDS)}")
        return value

    @field_validator("schedule")
    @classmethod
    def _known_schedule(cls, value):
        if value not in SCHEDULES:
            raise ValueError(f"schedule must be one of {', '.join(SCHEDULES)}")
        return value


def learning_rate_at(cfg: FitConfig, step: int) -> float:
    """Learning rate for the 1-based step; cosine decays toward zero over cfg.steps."""
    if cfg.schedule == "constant" or cfg.steps == 0:
        return cfg.learning_rate
    return 0.5 * cfg.learning_rate * (1.0 + math.cos(math.pi * (step - 1) / cfg.steps))


def check_loss(step: int, loss: float) -> None:
    if not np.isfinite(loss):
        raise TrainingDivergenceError(step, loss)


def train_network(
    net: Mlp,
    batches: BatchFn,
    loss_fn: LossFn,
    cfg: FitConfig,
    desc: str,
    callback: Optional[Callback] = None,
) -> Mlp:
    """
    Run cfg.steps Adam updates on minibatches.

    Args:
        net: Initial network
        batches: Draws (inputs, targets) from the given random stream
        loss_fn: Maps (outputs, targets) to (loss, gradient at outputs)
        cfg: Optimisation settings; cfg.seed seeds the batch stream
        desc: Label for progress and logs
        callback: Called as callback(step, net) after every update

    Returns:
        The trained network

    Raises:
        TrainingDivergenceError: If a loss is not finite
    """
    rng = np.random.default_rng(cfg.seed)
    optimizer = AdamState(learning_rate=cfg.learning_rate)
    logger.info(f"Training {desc} for {cfg.steps} steps (batch {cfg.batch_size})")
    for step in tqdm(range(1, cfg.steps + 1), desc=desc, disable=not cfg.progress):
        x, targets = batches(rng)
        optimizer.learning_rate = learning_rate_at(cfg, step)
        loss, grad = loss_fn(forward(net, x), targets)
        check_loss(step, loss)
        net = net.with_params(adam_step(optimizer, net.params, backward(net, x, grad)))
        if step % 1000 == 0:
            logger.debug(f"{desc} step {step}: loss {loss:.6f}")
        if callback is not None:
            callback(step, net)
    return net
