"""
Distance-distribution models and the statistics extracted from them.

Distances are handled in normalised space: bin b stands for (b + 1) / B.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp, softmax

from dwsl.services.mdp import MdpSpec, pair_features
from dwsl.services.nn import Mlp, forward
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import InputDomainError

STATISTICS = ("logsumexp", "expectation")


@dataclass(frozen=True, eq=False)
class CategoricalDistance:
    """Probabilities over B distance bins; ``support`` marks bins with observed mass."""

    probs: np.ndarray
    support: np.ndarray

    @property
    def num_bins(self) -> int:
        return len(self.probs)


def soft_minimum(probs: np.ndarray, values: np.ndarray, alpha: float) -> np.ndarray:
    """
    -alpha * log sum_b probs[b] * exp(-values[b] / alpha), evaluated in log-space.

    Works on a single distribution (B,) or a batch (n, B).
    """
    if alpha <= 0:
        raise InputDomainError(f"alpha must be positive, got {alpha}")
    probs = np.asarray(probs, dtype=np.float64)
    scaled = -np.asarray(values, dtype=np.float64) / alpha
    exponents = np.broadcast_to(scaled, probs.shape)
    return -alpha * logsumexp(exponents, b=probs, axis=-1)


def limit_temperature(probs: np.ndarray, tolerance: float, alpha: float) -> float:
    """
    A temperature at most ``alpha`` where every row's soft-minimum lies within
    ``tolerance`` of its smallest supported value.

    The soft-minimum exceeds that value by at most alpha * ln(1 / p), p being
    the row's mass there; the result keeps this bound at half the tolerance.
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    first = np.argmax(probs > 0.0, axis=-1)
    lowest = probs[np.arange(len(probs)), first]
    worst = float(np.max(-np.log(lowest), initial=0.0))
    if worst <= 0.0:
        return alpha
    return min(alpha, 0.5 * tolerance / worst)


def mean_distance(probs: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.asarray(probs, dtype=np.float64) @ np.asarray(values, dtype=np.float64)


class DistanceModel(ABC):
    """
    Goal-conditioned distance estimates over an MdpSpec.

    Classifier-style models expose distributions; ``estimate`` reduces them
    with a statistic. Regression models predict a distance directly and
    ignore the statistic.
    """

    backend: str = ""

    def __init__(self, spec: MdpSpec, binning: BinningConfig):
        self.spec = spec
        self.binning = binning

    @abstractmethod
    def estimate(
        self,
        states: np.ndarray,
        goals: np.ndarray,
        alpha: float,
        statistic: str = "logsumexp",
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Normalised distance estimates for (state, goal) pairs.

        Returns:
            (values, supported); values are NaN where unsupported
        """

    def distribution(self, s: int, g: int) -> Optional[CategoricalDistance]:
        return None


class CategoricalDistanceModel(DistanceModel):
    """A model producing a categorical distribution for every (state, goal)."""

    @abstractmethod
    def distributions(
        self, states: np.ndarray, goals: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Return (probs (n, B), supported (n,))."""

    def estimate(self, states, goals, alpha, statistic="logsumexp"):
        if statistic not in STATISTICS:
            raise InputDomainError(f"unknown distance statistic '{statistic}'")
        probs, supported = self.distributions(states, goals)
        values = np.full(len(supported), np.nan)
        if np.any(supported):
            rows = probs[supported]
            if statistic == "logsumexp":
                values[supported] = soft_minimum(rows, self.binning.values, alpha)
            else:
                values[supported] = mean_distance(rows, self.binning.values)
        return values, supported

    def distribution(self, s: int, g: int) -> Optional[CategoricalDistance]:
        probs, supported = self.distributions(np.array([s]), np.array([g]))
        if not supported[0]:
            return None
        return CategoricalDistance(probs=probs[0], support=probs[0] > 0)


class TabularDistanceModel(CategoricalDistanceModel):
    """Dense table of distributions; unobserved (state, goal) pairs are unsupported."""

    backend = "tabular"

    def __init__(
        self,
        spec: MdpSpec,
        binning: BinningConfig,
        probs: np.ndarray,
        support: np.ndarray,
    ):
        super().__init__(spec, binning)
        expected = (spec.num_states, spec.goal_count, binning.num_bins)
        if probs.shape != expected:
            raise InputDomainError(f"table shape {probs.shape} != {expected}")
        self.probs = probs
        self.support = support

    def distributions(self, states, goals):
        states = np.asarray(states, dtype=int)
        goals = np.asarray(goals, dtype=int)
        return self.probs[states, goals], self.support[states, goals]


class ClassifierDistanceModel(CategoricalDistanceModel):
    """MLP softmax classifier over distance bins; every pair is supported."""

    backend = "mlp-classifier"

    def __init__(self, spec: MdpSpec, binning: BinningConfig, net: Mlp, features: str):
        super().__init__(spec, binning)
        self.net = net
        self.features = features

    def logits(self, states, goals) -> np.ndarray:
        return forward(self.net, pair_features(self.spec, states, goals, self.features))

    def distributions(self, states, goals):
        probs = softmax(self.logits(states, goals), axis=1)
        return probs, np.ones(len(probs), dtype=bool)


class RegressionDistanceModel(DistanceModel):
    """Scalar MLP regressor of normalised distance (mean or expectile fit)."""

    backend = "mlp-regressor"

    def __init__(
        self,
        spec: MdpSpec,
        binning: BinningConfig,
        net: Mlp,
        features: str,
        mode: str = "mse",
        tau: Optional[float] = None,
    ):
        super().__init__(spec, binning)
        self.net = net
        self.features = features
        self.mode = mode
        self.tau = tau

    def predict(self, states, goals) -> np.ndarray:
        x = pair_features(self.spec, states, goals, self.features)
        return forward(self.net, x)[:, 0]

    def estimate(self, states, goals, alpha, statistic="logsumexp"):
        values = self.predict(states, goals)
        return values, np.ones(len(values), dtype=bool)


def logsumexp_distance(
    model: DistanceModel, s: int, g: int, alpha: float
) -> Optional[float]:
    """
    Soft-minimum normalised distance from s to g.

    Returns:
        The estimate, or None if the pair is unsupported
    """
    values, supported = model.estimate(np.array([s]), np.array([g]), alpha, "logsumexp")
    return float(values[0]) if supported[0] else None


def expectation_distance(model: DistanceModel, s: int, g: int) -> Optional[float]:
    """Mean normalised distance from s to g, or None if unsupported."""
    values, supported = model.estimate(np.array([s]), np.array([g]), 1.0, "expectation")
    return float(values[0]) if supported[0] else None
