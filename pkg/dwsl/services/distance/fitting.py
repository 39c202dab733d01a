"""
Fitting distance models on relabeled data.
"""

from typing import Optional

import numpy as np

from dwsl.services.datagen import Dataset
from dwsl.services.distance.models import (
    ClassifierDistanceModel,
    RegressionDistanceModel,
    TabularDistanceModel,
)
from dwsl.services.mdp import feature_size, pair_features
from dwsl.services.nn import (
    FitConfig,
    expectile_loss,
    init_mlp,
    mse_loss,
    softmax_cross_entropy,
    train_network,
)
from dwsl.services.relabel import BinningConfig, enumerate_all_pairs, sample_batch
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger

REGRESSION_MODES = ("mse", "expectile")


def fit_tabular(dataset: Dataset, cfg: BinningConfig) -> TabularDistanceModel:
    """
    Exact maximum-likelihood table of p(bin | s, g).

    Every (trajectory, i, j) pair contributes its sampler-law mass
    1/T * 1/(T - i) to the bin of its distance; each observed (s, g) row is
    normalised and unobserved rows stay at zero with support False.
    """
    spec = dataset.spec
    pairs = enumerate_all_pairs(dataset, cfg)
    mass = np.zeros((spec.num_states, spec.goal_count, cfg.num_bins))
    np.add.at(mass, (pairs.states, pairs.goals, pairs.bins), pairs.weights)
    totals = mass.sum(axis=2)
    support = totals > 0
    probs = np.zeros_like(mass)
    probs[support] = mass[support] / totals[support][:, None]
    logger.info(
        f"Fitted tabular distances: {int(support.sum())} supported (state, goal) pairs "
        f"from {len(pairs)} relabeled pairs"
    )
    return TabularDistanceModel(spec, cfg, probs, support)


def _batches(dataset: Dataset, cfg: BinningConfig, fit_cfg: FitConfig, target):
    spec = dataset.spec

    def draw(rng: np.random.Generator):
        batch = sample_batch(dataset, cfg, fit_cfg.batch_size, rng)
        x = pair_features(spec, batch.states, batch.goals, fit_cfg.features)
        return x, target(batch)

    return draw


def train_classifier(
    dataset: Dataset, cfg: BinningConfig, fit_cfg: FitConfig
) -> ClassifierDistanceModel:
    """
    Train an MLP softmax classifier of the distance bin by cross-entropy.

    Args:
        dataset: Offline dataset
        cfg: Distance binning
        fit_cfg: Optimisation settings

    Returns:
        The trained classifier model
    """
    spec = dataset.spec
    if cfg.num_bins < 2:
        logger.warning("Distance classifier with a single bin carries no information")
    sizes = (feature_size(spec, fit_cfg.features), *fit_cfg.hidden_sizes, cfg.num_bins)
    net = init_mlp(sizes, fit_cfg.seed)
    net = train_network(
        net,
        _batches(dataset, cfg, fit_cfg, lambda batch: batch.bins),
        softmax_cross_entropy,
        fit_cfg,
        desc="distance classifier",
    )
    return ClassifierDistanceModel(spec, cfg, net, fit_cfg.features)


def train_regression(
    dataset: Dataset,
    cfg: BinningConfig,
    fit_cfg: FitConfig,
    mode: str = "mse",
    tau: Optional[float] = None,
) -> RegressionDistanceModel:
    """
    Train a scalar regressor of the normalised distance (bin + 1) / B.

    ``mse`` fits the conditional mean; ``expectile`` fits the tau-expectile of
    the distance with overestimates penalised by tau, which pulls the
    prediction toward the shortest observed distances.
    """
    if mode not in REGRESSION_MODES:
        raise InputDomainError(f"unknown regression mode '{mode}'")
    if mode == "expectile" and (tau is None or not 0.5 < tau < 1.0):
        raise InputDomainError(f"expectile tau must lie in (0.5, 1), got {tau}")

    spec = dataset.spec
    values = cfg.values
    if mode == "mse":
        loss_fn = mse_loss
    else:

        def loss_fn(predictions, targets):
            return expectile_loss(predictions, targets, tau)

    sizes = (feature_size(spec, fit_cfg.features), *fit_cfg.hidden_sizes, 1)
    net = train_network(
        init_mlp(sizes, fit_cfg.seed),
        _batches(dataset, cfg, fit_cfg, lambda batch: values[batch.bins]),
        loss_fn,
        fit_cfg,
        desc=f"distance regressor ({mode})",
    )
    return RegressionDistanceModel(spec, cfg, net, fit_cfg.features, mode=mode, tau=tau)
