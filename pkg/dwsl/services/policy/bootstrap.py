"""
Bootstrapped distance distributions (DWSL-B).
"""

import numpy as np
from scipy.special import softmax
from tqdm import tqdm

from dwsl.services.datagen import Dataset
from dwsl.services.distance import ClassifierDistanceModel
from dwsl.services.mdp import feature_size, pair_features
from dwsl.services.nn import (
    AdamState,
    Mlp,
    adam_step,
    backward,
    check_loss,
    forward,
    init_mlp,
    learning_rate_at,
    soft_cross_entropy,
)
from dwsl.services.policy.config import TrainConfig
from dwsl.services.relabel import BinningConfig, sample_batch
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger


def shift_distribution(probs: np.ndarray) -> np.ndarray:
    """Add one step to every distance; mass in the last bin stays there."""
    shifted = np.zeros_like(probs)
    shifted[:, 1:] = probs[:, :-1]
    shifted[:, -1] += probs[:, -1]
    return shifted


def bootstrap_targets(
    spec, target_net: Mlp, next_states, goals, num_bins: int, features: str
) -> np.ndarray:
    """
    Point mass at bin 0 where the next state achieves the goal, otherwise the
    target network's distribution at (s_next, g) shifted by one bin.
    """
    probs = softmax(
        forward(target_net, pair_features(spec, next_states, goals, features)), axis=1
    )
    targets = shift_distribution(probs)
    achieved = spec.goal_map[next_states] == goals
    targets[achieved] = 0.0
    targets[achieved, 0] = 1.0
    return targets


def polyak_update(online: Mlp, target: Mlp, polyak: float) -> Mlp:
    return target.with_params(
        [polyak * p + (1.0 - polyak) * q for p, q in zip(online.params, target.params)]
    )


def train_dwsl_b(
    dataset: Dataset, binning: BinningConfig, cfg: TrainConfig
) -> ClassifierDistanceModel:
    """
    Learn distance distributions by a distributional one-step backup.

    The online network fits bootstrap targets by cross-entropy; every
    cfg.target_update_period steps the target network moves toward it with
    coefficient cfg.polyak.

    Args:
        dataset: Offline dataset
        binning: Distance binning; only N = 1 is supported
        cfg: Optimisation and target-network settings

    Returns:
        Classifier distance model from the online network
    """
    if binning.n_step != 1:
        raise InputDomainError("bootstrapped distances require n_step = 1")
    spec = dataset.spec
    B = binning.num_bins
    sizes = (feature_size(spec, cfg.features), *cfg.hidden_sizes, B)
    online = init_mlp(sizes, cfg.seed)
    target = online
    optimizer = AdamState(learning_rate=cfg.learning_rate)
    rng = np.random.default_rng(cfg.seed)

    logger.info(
        f"Training bootstrapped distances for {cfg.steps} steps "
        f"(target period {cfg.target_update_period}, polyak {cfg.polyak})"
    )
    for step in tqdm(range(1, cfg.steps + 1), desc="dwsl-b", disable=not cfg.progress):
        batch = sample_batch(dataset, binning, cfg.batch_size, rng)
        targets = bootstrap_targets(
            spec, target, batch.next_states, batch.goals, B, cfg.features
        )
        x = pair_features(spec, batch.states, batch.goals, cfg.features)
        loss, grad = soft_cross_entropy(forward(online, x), targets)
        check_loss(step, loss)
        optimizer.learning_rate = learning_rate_at(cfg, step)
        online = online.with_params(
            adam_step(optimizer, online.params, backward(online, x, grad))
        )
        if step % cfg.target_update_period == 0:
            target = polyak_update(online, target, cfg.polyak)
        if step % 1000 == 0:
            logger.debug(f"dwsl-b step {step}: loss {loss:.6f}")
    return ClassifierDistanceModel(spec, binning, online, cfg.features)
