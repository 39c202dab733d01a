"""
Two-phase training: distance model first, policy second.
"""

from typing import Optional, Tuple

from dwsl.services.datagen import Dataset
from dwsl.services.distance import (
    DistanceModel,
    fit_tabular,
    train_classifier,
    train_regression,
)
from dwsl.services.policy.bootstrap import train_dwsl_b
from dwsl.services.policy.config import TrainConfig
from dwsl.services.policy.models import PolicyModel
from dwsl.services.policy.training import (
    PolicyCallback,
    train_awr_variant,
    train_dwsl,
    train_gcsl,
    train_weighted_policy,
)
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import InputDomainError

ALGORITHMS = ("dwsl", "gcsl", "awr", "expectile", "dwsl_b")


def fit_distance_model(
    dataset: Dataset,
    algorithm: str,
    backend: str,
    binning: BinningConfig,
    cfg: TrainConfig,
) -> Optional[DistanceModel]:
    """
    Phase one. GCSL has no distance model; the expectile and bootstrapped
    variants always use networks; DWSL and AWR follow ``backend``.
    """
    if algorithm == "gcsl":
        return None
    if algorithm == "expectile":
        return train_regression(
            dataset, binning, cfg, mode="expectile", tau=cfg.expectile
        )
    if algorithm == "dwsl_b":
        return train_dwsl_b(dataset, binning, cfg)
    if backend == "tabular":
        return fit_tabular(dataset, binning)
    return train_classifier(dataset, binning, cfg)


def run_algorithm(
    dataset: Dataset,
    algorithm: str,
    backend: str,
    binning: BinningConfig,
    cfg: TrainConfig,
    callback: Optional[PolicyCallback] = None,
) -> Tuple[Optional[DistanceModel], PolicyModel]:
    """
    Train the distance model and extract the policy for one algorithm.

    Args:
        dataset: Offline dataset
        algorithm: One of dwsl, gcsl, awr, expectile, dwsl_b
        backend: Policy backend, 'tabular' or 'mlp'
        binning: Distance binning
        cfg: Hyperparameters
        callback: Called as callback(step, policy) during MLP policy training

    Returns:
        (distance model or None, policy)
    """
    if algorithm not in ALGORITHMS:
        raise InputDomainError(
            f"unknown algorithm '{algorithm}'; expected one of {', '.join(ALGORITHMS)}"
        )
    if algorithm == "dwsl_b" and binning.n_step != 1:
        raise InputDomainError("dwsl_b requires n_step = 1")

    distance_model = fit_distance_model(dataset, algorithm, backend, binning, cfg)
    if algorithm == "gcsl":
        policy = train_gcsl(dataset, cfg, backend, binning, callback)
    elif algorithm == "awr":
        policy = train_awr_variant(
            dataset, cfg, distance_model, binning, backend, callback
        )
    elif algorithm == "expectile":
        policy = train_weighted_policy(
            dataset, distance_model, cfg, "logsumexp", backend, callback
        )
    else:
        policy = train_dwsl(dataset, distance_model, cfg, backend, callback)
    return distance_model, policy
