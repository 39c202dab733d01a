"""
Losses returning (mean loss, gradient at the network output).
"""

from typing import Optional, Tuple

import numpy as np
from scipy.special import log_softmax

from dwsl.utils.errors import InputDomainError


def _weights(weights: Optional[np.ndarray], n: int) -> np.ndarray:
    return np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)


def softmax_cross_entropy(
    logits: np.ndarray, targets, weights: Optional[np.ndarray] = None
) -> Tuple[float, np.ndarray]:
    """
    Weighted mean of -log softmax(logits)[target], evaluated in log-space.

    Args:
        logits: Array (n, C), or a single vector (C,)
        targets: Class indices, shape (n,), or a single index
        weights: Optional per-row weights

    Returns:
        (loss, gradient with the shape of ``logits``)
    """
    logits = np.asarray(logits, dtype=np.float64)
    single = logits.ndim == 1
    z = logits[None, :] if single else logits
    t = np.atleast_1d(np.asarray(targets, dtype=int))
    if np.any(t < 0) or np.any(t >= z.shape[1]):
        raise InputDomainError("target class out of range")
    n = z.shape[0]
    w = _weights(weights, n)
    log_probs = log_softmax(z, axis=1)
    rows = np.arange(n)
    loss = float(np.sum(-w * log_probs[rows, t]) / n)
    grad = np.exp(log_probs)
    grad[rows, t] -= 1.0
    grad *= (w / n)[:, None]
    return loss, grad[0] if single else grad


def soft_cross_entropy(
    logits: np.ndarray, targets: np.ndarray, weights: Optional[np.ndarray] = None
) -> Tuple[float, np.ndarray]:
    """Cross-entropy against target distributions (n, C)."""
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    n = logits.shape[0]
    w = _weights(weights, n)
    log_probs = log_softmax(logits, axis=1)
    loss = float(np.sum(-w * np.sum(targets * log_probs, axis=1)) / n)
    grad = (np.exp(log_probs) * targets.sum(axis=1, keepdims=True) - targets) * (
        w / n
    )[:, None]
    return loss, grad


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean squared error of a scalar head (n, 1)."""
    u = np.asarray(predictions, dtype=np.float64).reshape(-1) - targets
    n = len(u)
    return float(np.mean(u * u)), (2.0 * u / n).reshape(-1, 1)


def expectile_loss(
    predictions: np.ndarray, targets: np.ndarray, tau: float
) -> Tuple[float, np.ndarray]:
    """
    Asymmetric squared loss |tau - 1{u < 0}| * u^2 with u = prediction - target.

    Overestimates are penalised with weight tau, so for tau > 0.5 the fit moves
    toward the small end of the target distribution.
    """
    if not 0.0 < tau < 1.0:
        raise InputDomainError(f"expectile must lie in (0, 1), got {tau}")
    u = np.asarray(predictions, dtype=np.float64).reshape(-1) - targets
    n = len(u)
    scale = np.where(u < 0.0, 1.0 - tau, tau)
    return float(np.mean(scale * u * u)), (2.0 * scale * u / n).reshape(-1, 1)
