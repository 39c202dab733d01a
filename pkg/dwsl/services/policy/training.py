"""
Weighted imitation on relabeled data: DWSL, GCSL and the AWR variant.

The tabular backend solves the weighted maximum-likelihood problem in closed
form, pi(a | s, g) proportional to pi_r(a | s, g) * w(s, f(s, a), g); the MLP
backend maximises the weighted log-likelihood on sampled batches.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from dwsl.services.datagen import Dataset
from dwsl.services.distance import DistanceModel, fit_tabular
from dwsl.services.mdp import MdpSpec, feature_size, pair_features
from dwsl.services.nn import init_mlp, softmax_cross_entropy, train_network
from dwsl.services.policy.config import TrainConfig
from dwsl.services.policy.models import MlpPolicy, PolicyModel, TabularPolicy
from dwsl.services.policy.weighting import advantage, weight
from dwsl.services.relabel import BinningConfig, action_frequencies, sample_batch
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger

POLICY_BACKENDS = ("tabular", "mlp")

PolicyCallback = Callable[[int, PolicyModel], None]


def transition_weights(
    spec: MdpSpec,
    current: DistanceModel,
    following: DistanceModel,
    states: np.ndarray,
    next_states: np.ndarray,
    goals: np.ndarray,
    cfg: TrainConfig,
    statistic: str = "logsumexp",
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exponentiated advantages of transitions s -> s_next under goal g.

    ``current`` scores s and ``following`` scores s_next; they are the same
    model except for time-indexed exact distances. A next state that already
    achieves the goal without a supported estimate is scored 1 / B. Any other
    unsupported query gets advantage 0 and is flagged.

    Returns:
        (weights, fallback mask)
    """
    num_bins = current.binning.num_bins
    d_cur, sup_cur = current.estimate(states, goals, cfg.alpha, statistic)
    d_next, sup_next = following.estimate(next_states, goals, cfg.alpha, statistic)
    achieved = spec.goal_map[next_states] == goals
    patch = achieved & ~sup_next
    d_next = np.where(patch, 1.0 / num_bins, d_next)
    fallback = ~sup_cur | ~(sup_next | patch)
    adv = advantage(spec, d_cur, d_next, next_states, goals, num_bins)
    adv = np.where(fallback, 0.0, adv)
    return weight(adv, cfg.beta, cfg.clip), fallback


def extract_tabular_policy(
    spec: MdpSpec,
    behavior_probs: np.ndarray,
    behavior_support: np.ndarray,
    current: DistanceModel,
    following: DistanceModel,
    cfg: TrainConfig,
    statistic: str = "logsumexp",
) -> TabularPolicy:
    """
    Closed-form weighted imitation of a tabular relabeling policy.

    Args:
        spec: The environment
        behavior_probs: pi_r as an array (S, G, A)
        behavior_support: Rows of pi_r that carry data (S, G)
        current: Distance model scoring the current state
        following: Distance model scoring the next state
        cfg: Temperatures and clipping
        statistic: 'logsumexp' or 'expectation'

    Returns:
        TabularPolicy proportional to pi_r * weight on every supported row
    """
    S, G, A = spec.num_states, spec.goal_count, spec.num_actions
    ss, gg, aa = np.meshgrid(np.arange(S), np.arange(G), np.arange(A), indexing="ij")
    states, goals = ss.ravel(), gg.ravel()
    next_states = spec.transitions[states, aa.ravel()]
    w, fallback = transition_weights(
        spec, current, following, states, next_states, goals, cfg, statistic
    )
    w = w.reshape(S, G, A)
    used = behavior_probs > 0
    fallbacks = int(np.count_nonzero(fallback.reshape(S, G, A) & used))
    if fallbacks:
        logger.warning(f"{fallbacks} behavior transitions had no distance estimate")

    unnormalised = behavior_probs * w
    totals = unnormalised.sum(axis=2)
    support = behavior_support & (totals > 0)
    probs = np.zeros_like(unnormalised)
    probs[support] = unnormalised[support] / totals[support][:, None]
    return TabularPolicy(spec, probs, support, training_fallbacks=fallbacks)


def _train_mlp_policy(
    dataset: Dataset,
    cfg: TrainConfig,
    binning: BinningConfig,
    distance_model: Optional[DistanceModel],
    statistic: str,
    desc: str,
    callback: Optional[PolicyCallback],
) -> MlpPolicy:
    spec = dataset.spec
    fallbacks = 0

    def draw(rng: np.random.Generator):
        nonlocal fallbacks
        batch = sample_batch(dataset, binning, cfg.batch_size, rng)
        if distance_model is None:
            w = np.ones(len(batch))
        else:
            w, fallback = transition_weights(
                spec,
                distance_model,
                distance_model,
                batch.states,
                batch.next_states,
                batch.goals,
                cfg,
                statistic,
            )
            fallbacks += int(fallback.sum())
        x = pair_features(spec, batch.states, batch.goals, cfg.features)
        return x, (batch.actions, w)

    def loss_fn(logits, targets):
        actions, w = targets
        return softmax_cross_entropy(logits, actions, w)

    def on_step(step, net):
        if callback is not None:
            callback(step, MlpPolicy(spec, net, cfg.features, fallbacks))

    sizes = (feature_size(spec, cfg.features), *cfg.hidden_sizes, spec.num_actions)
    net = train_network(init_mlp(sizes, cfg.seed), draw, loss_fn, cfg, desc, on_step)
    if fallbacks:
        logger.warning(f"{fallbacks} sampled transitions had no distance estimate")
    return MlpPolicy(spec, net, cfg.features, fallbacks)


def _check_backend(backend: str) -> None:
    if backend not in POLICY_BACKENDS:
        raise InputDomainError(
            f"unknown policy backend '{backend}'; "
            f"expected one of {', '.join(POLICY_BACKENDS)}"
        )


def train_weighted_policy(
    dataset: Dataset,
    distance_model: DistanceModel,
    cfg: TrainConfig,
    statistic: str = "logsumexp",
    backend: str = "tabular",
    callback: Optional[PolicyCallback] = None,
) -> PolicyModel:
    """Advantage-weighted imitation with distances reduced by ``statistic``."""
    _check_backend(backend)
    if backend == "tabular":
        behavior, support = action_frequencies(dataset)
        return extract_tabular_policy(
            dataset.spec,
            behavior,
            support,
            distance_model,
            distance_model,
            cfg,
            statistic,
        )
    return _train_mlp_policy(
        dataset,
        cfg,
        distance_model.binning,
        distance_model,
        statistic,
        f"policy ({statistic})",
        callback,
    )


def train_dwsl(
    dataset: Dataset,
    distance_model: DistanceModel,
    cfg: TrainConfig,
    backend: str = "tabular",
    callback: Optional[PolicyCallback] = None,
) -> PolicyModel:
    """
    Distance weighted imitation with LogSumExp soft-minimum distances.

    Args:
        dataset: Offline dataset the distance model was fitted on
        distance_model: Fitted distance model
        cfg: Temperatures, clipping and optimisation settings
        backend: 'tabular' (closed form) or 'mlp'
        callback: Called as callback(step, policy) during MLP training

    Returns:
        The trained policy; ``training_fallbacks`` counts unsupported queries
    """
    logger.info(f"Extracting DWSL policy ({backend}, beta={cfg.beta}, clip={cfg.clip})")
    return train_weighted_policy(
        dataset, distance_model, cfg, "logsumexp", backend, callback
    )


def train_gcsl(
    dataset: Dataset,
    cfg: TrainConfig,
    backend: str = "tabular",
    binning: Optional[BinningConfig] = None,
    callback: Optional[PolicyCallback] = None,
) -> PolicyModel:
    """Goal-conditioned imitation of relabeled actions with unit weights."""
    _check_backend(backend)
    logger.info(f"Training GCSL policy ({backend})")
    if backend == "tabular":
        probs, support = action_frequencies(dataset)
        return TabularPolicy(dataset.spec, probs, support)
    binning = binning or BinningConfig.for_horizon(dataset.spec.horizon)
    return _train_mlp_policy(
        dataset, cfg, binning, None, "logsumexp", "policy (gcsl)", callback
    )


def train_awr_variant(
    dataset: Dataset,
    cfg: TrainConfig,
    distance_model: Optional[DistanceModel] = None,
    binning: Optional[BinningConfig] = None,
    backend: str = "tabular",
    callback: Optional[PolicyCallback] = None,
) -> PolicyModel:
    """
    DWSL with the expected distance in place of the soft minimum.

    Without a distance model a tabular one is fitted on ``dataset``.
    """
    if distance_model is None:
        distance_model = fit_tabular(
            dataset, binning or BinningConfig.for_horizon(dataset.spec.horizon)
        )
    logger.info(f"Extracting AWR-variant policy ({backend})")
    return train_weighted_policy(
        dataset, distance_model, cfg, "expectation", backend, callback
    )
