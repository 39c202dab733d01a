"""
KL-constrained soft value iteration and the optimal KL-regularised policy.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from dwsl.config import SOLVER_MAX_ITERATIONS, SOLVER_TOLERANCE
from dwsl.services.mdp import MdpSpec, reward_table
from dwsl.services.oracle.behavior import EmpiricalBehavior
from dwsl.services.policy import TabularPolicy
from dwsl.utils.errors import InputDomainError, SolverError, SupportError
from dwsl.utils.logging import logger


@dataclass(frozen=True, eq=False)
class SoftValueTable:
    """
    Soft values of the KL-constrained problem.

    V is (H + 1, S, G) for a finite horizon H and (1, S, G) for the infinite
    horizon; Q and A are (H, S, A, G) or (1, S, A, G). Unsupported rows hold -inf.
    """

    V: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    alpha: float
    gamma: float
    horizon: Optional[int]
    iterations: int = 0

    @property
    def finite(self) -> bool:
        return self.horizon is not None


def _soft_backup(
    Q: np.ndarray, behavior: EmpiricalBehavior, alpha: float
) -> np.ndarray:
    # Q is (S, A, G); pi_r is (S, G, A)
    weights = behavior.probs.transpose(0, 2, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        V = alpha * logsumexp(Q / alpha, b=weights, axis=1)
    return np.where(behavior.support, V, -np.inf)


def _q_values(spec, rewards, V_next, gamma):
    with np.errstate(invalid="ignore"):
        return rewards + gamma * V_next[spec.transitions]


def _finite_residual(a: np.ndarray, b: np.ndarray) -> float:
    both = np.isfinite(a) & np.isfinite(b)
    mismatch = np.isfinite(a) != np.isfinite(b)
    if np.any(mismatch):
        return float("inf")
    return float(np.max(np.abs(a[both] - b[both]), initial=0.0))


def soft_value_iteration(
    spec: MdpSpec,
    behavior: EmpiricalBehavior,
    alpha: float,
    gamma: float = 1.0,
    horizon: Optional[int] = None,
    reward: Optional[np.ndarray] = None,
    tolerance: float = SOLVER_TOLERANCE,
    max_iterations: int = SOLVER_MAX_ITERATIONS,
) -> SoftValueTable:
    """
    Solve Q = r + gamma * V(s'), V = alpha * log sum_a pi_r(a|s,g) exp(Q / alpha).

    gamma = 1 (or an explicit horizon) runs the backward recursion from
    V_H = 0; gamma < 1 without a horizon iterates to the stationary fixed point.

    Args:
        spec: The environment
        behavior: pi_r
        alpha: KL temperature
        gamma: Discount in (0, 1]
        horizon: Finite horizon (defaults to spec.horizon when gamma = 1)
        reward: Reward array (S, A, G), defaults to the sparse goal reward
        tolerance: Fixed-point residual for the infinite horizon
        max_iterations: Iteration cap for the infinite horizon

    Returns:
        SoftValueTable

    Raises:
        SolverError: If the infinite-horizon iteration does not converge
    """
    if alpha <= 0:
        raise InputDomainError(f"alpha must be positive, got {alpha}")
    if not 0.0 < gamma <= 1.0:
        raise InputDomainError(f"gamma must lie in (0, 1], got {gamma}")
    rewards = reward_table(spec) if reward is None else np.asarray(reward, dtype=float)
    if gamma == 1.0 and horizon is None:
        horizon = spec.horizon

    S, G = spec.num_states, spec.goal_count
    if horizon is not None:
        V = np.zeros((horizon + 1, S, G))
        Q = np.zeros((horizon, S, spec.num_actions, G))
        for t in reversed(range(horizon)):
            Q[t] = _q_values(spec, rewards, V[t + 1], gamma)
            V[t] = _soft_backup(Q[t], behavior, alpha)
        with np.errstate(invalid="ignore"):
            A = Q - V[:-1, :, None, :]
        return SoftValueTable(V, Q, A, alpha, gamma, horizon, horizon)

    V = np.where(behavior.support, 0.0, -np.inf)
    residual = float("inf")
    for iteration in range(1, max_iterations + 1):
        Q = _q_values(spec, rewards, V, gamma)
        V_new = _soft_backup(Q, behavior, alpha)
        residual = _finite_residual(V_new, V)
        V = V_new
        if residual <= tolerance:
            logger.debug(
                f"Soft value iteration converged in {iteration} iterations "
                f"(alpha={alpha}, gamma={gamma})"
            )
            Q = _q_values(spec, rewards, V, gamma)
            with np.errstate(invalid="ignore"):
                A = Q - V[:, None, :]
            return SoftValueTable(
                V[None], Q[None], A[None], alpha, gamma, None, iteration
            )
    raise SolverError(residual, max_iterations)


def behavior_value(
    spec: MdpSpec,
    behavior: EmpiricalBehavior,
    gamma: float,
    reward: Optional[np.ndarray] = None,
    tolerance: float = SOLVER_TOLERANCE,
    max_iterations: int = SOLVER_MAX_ITERATIONS,
) -> np.ndarray:
    """
    Expected discounted return of pi_r, shape (S, G).

    This is the alpha -> infinity limit of the soft values. Unsupported rows,
    and rows that reach them, hold -inf.

    Raises:
        SolverError: If policy evaluation does not converge
    """
    if not 0.0 < gamma < 1.0:
        raise InputDomainError(f"policy evaluation needs gamma in (0, 1), got {gamma}")
    rewards = reward_table(spec) if reward is None else np.asarray(reward, dtype=float)
    weights = behavior.probs.transpose(0, 2, 1)
    V = np.where(behavior.support, 0.0, -np.inf)
    residual = float("inf")
    for _ in range(max_iterations):
        Q = _q_values(spec, rewards, V, gamma)
        with np.errstate(invalid="ignore"):
            expected = np.where(weights > 0, weights * Q, 0.0).sum(axis=1)
        V_new = np.where(behavior.support, expected, -np.inf)
        residual = _finite_residual(V_new, V)
        V = V_new
        if residual <= tolerance:
            return V
    raise SolverError(residual, max_iterations)


def fixed_point_residual(
    spec: MdpSpec,
    table: SoftValueTable,
    behavior: EmpiricalBehavior,
    reward: Optional[np.ndarray] = None,
) -> float:
    """Largest violation of the soft Bellman equations over all table entries."""
    rewards = reward_table(spec) if reward is None else reward
    residual = 0.0
    for t in range(table.Q.shape[0]):
        V_next = table.V[t + 1] if table.finite else table.V[0]
        Q = _q_values(spec, rewards, V_next, table.gamma)
        residual = max(residual, _finite_residual(Q, table.Q[t]))
        V = _soft_backup(table.Q[t], behavior, table.alpha)
        residual = max(residual, _finite_residual(V, table.V[t]))
    return residual


def optimal_kl_policy(
    spec: MdpSpec, table: SoftValueTable, behavior: EmpiricalBehavior
) -> TabularPolicy:
    """
    pi*(a | s, g) proportional to pi_r(a | s, g) * exp(A*(s, a, g) / alpha).

    Finite-horizon tables give a time-indexed policy, infinite-horizon tables a
    stationary one. Computed in log-space from Q, which differs from A by a
    per-row constant.

    Raises:
        SupportError: If a supported row has no mass on any action with finite value
    """
    pi = behavior.probs.transpose(0, 2, 1)
    with np.errstate(divide="ignore"):
        log_pi = np.log(pi)
    slices = []
    for t in range(table.Q.shape[0]):
        with np.errstate(invalid="ignore"):
            logits = log_pi + table.Q[t] / table.alpha
        logits = np.where(pi > 0, logits, -np.inf)
        with np.errstate(divide="ignore"):
            log_norm = logsumexp(logits, axis=1)
        bad = behavior.support & ~np.isfinite(log_norm)
        if np.any(bad):
            s, g = np.argwhere(bad)[0]
            raise SupportError(
                f"policy row (state {s}, goal {g}) has no action with finite value"
            )
        with np.errstate(invalid="ignore"):
            probs = np.exp(logits - log_norm[:, None, :])
        probs = np.where(behavior.support[:, None, :], probs, 0.0)
        slices.append(probs.transpose(0, 2, 1))

    if table.finite:
        shape = (len(slices), *behavior.support.shape)
        support = np.broadcast_to(behavior.support, shape)
        return TabularPolicy(spec, np.stack(slices), support.copy())
    return TabularPolicy(spec, slices[0], behavior.support.copy())
