"""
Exhaustive enumeration of relabeling-policy trajectories.
"""

import math
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from dwsl.config import ENUMERATION_MAX_ATOMS, TRUNCATION_EPSILON
from dwsl.services.mdp import MdpSpec
from dwsl.services.oracle.behavior import EmpiricalBehavior
from dwsl.utils.errors import EnumerationLimitError, InputDomainError


def truncation_horizon(gamma: float, epsilon: float = TRUNCATION_EPSILON) -> int:
    """
    Steps after which discounted rewards sum to less than epsilon.

    ceil(log(eps * (1 - gamma)) / log(gamma))
    """
    if not 0.0 < gamma < 1.0:
        raise InputDomainError(f"truncation needs gamma in (0, 1), got {gamma}")
    return int(math.ceil(math.log(epsilon * (1.0 - gamma)) / math.log(gamma)))


def enumeration_steps(spec: MdpSpec, gamma: float, horizon: Optional[int]) -> int:
    if horizon is not None:
        return horizon
    return spec.horizon if gamma == 1.0 else truncation_horizon(gamma)


def _absorbing(spec: MdpSpec, behavior: EmpiricalBehavior, s: int, g: int) -> bool:
    if spec.goal_map[s] != g or not behavior.support[s, g]:
        return False
    taken = behavior.probs[s, g] > 0
    return bool(np.all(spec.transitions[s, taken] == s))


def return_atoms(
    spec: MdpSpec,
    behavior: EmpiricalBehavior,
    s: int,
    g: int,
    gamma: float,
    steps: int,
    max_atoms: int = ENUMERATION_MAX_ATOMS,
) -> List[Tuple[float, float]]:
    """
    Distribution of discounted returns over pi_r trajectories from s.

    Paths reaching the same state with the same return are merged. A path
    sitting on an achieved goal whose actions all loop in place is finalised,
    since its future rewards are all zero. A path entering an unsupported
    (state, goal) row is dropped: it carries no behavior mass.

    Returns:
        List of (probability, return) atoms

    Raises:
        EnumerationLimitError: If more than max_atoms atoms are alive at once
    """
    atoms: Dict[Tuple[int, float], float] = {(int(s), 0.0): 1.0}
    finished: List[Tuple[float, float]] = []
    phi = spec.goal_map
    for t in range(steps):
        discount = gamma**t
        frontier: Dict[Tuple[int, float], float] = defaultdict(float)
        for (state, ret), p in atoms.items():
            if _absorbing(spec, behavior, state, g):
                finished.append((p, ret))
                continue
            if not behavior.support[state, g]:
                continue
            row = behavior.probs[state, g]
            for a in np.flatnonzero(row):
                s_next = int(spec.transitions[state, a])
                r = 0.0 if phi[s_next] == g else -1.0
                frontier[(s_next, ret + discount * r)] += p * row[a]
        if len(frontier) + len(finished) > max_atoms:
            raise EnumerationLimitError(
                f"enumeration from state {s} toward goal {g} exceeds {max_atoms} atoms "
                f"at step {t + 1}"
            )
        atoms = frontier
        if not atoms:
            break
    finished.extend((p, ret) for (_, ret), p in atoms.items())
    return finished


def empirical_soft_value(
    spec: MdpSpec,
    behavior: EmpiricalBehavior,
    s: int,
    g: int,
    alpha: float,
    gamma: float = 1.0,
    horizon: Optional[int] = None,
    max_atoms: int = ENUMERATION_MAX_ATOMS,
) -> float:
    """
    alpha * log E_{pi_r}[exp(return / alpha)] by exhaustive enumeration.

    With gamma = 1 the horizon defaults to spec.horizon; with gamma < 1 and no
    horizon the sum is truncated at truncation_horizon(gamma).

    Args:
        spec: The environment
        behavior: pi_r
        s: Start state
        g: Goal
        alpha: Temperature
        gamma: Discount in (0, 1]
        horizon: Number of steps to enumerate
        max_atoms: Enumeration cap

    Returns:
        The soft value (-inf if no path keeps behavior support)
    """
    if alpha <= 0:
        raise InputDomainError(f"alpha must be positive, got {alpha}")
    if not behavior.support[spec.check_state(s), spec.check_goal(g)]:
        raise InputDomainError(
            f"(state {s}, goal {g}) is not supported by the behavior"
        )
    steps = enumeration_steps(spec, gamma, horizon)
    atoms = return_atoms(spec, behavior, s, g, gamma, steps, max_atoms)
    if not atoms:
        return float("-inf")
    probs, returns = (np.array(col) for col in zip(*atoms))
    return float(alpha * logsumexp(returns / alpha, b=probs))
