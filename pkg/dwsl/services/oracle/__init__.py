"""
Exact oracles: soft value iteration, trajectory enumeration, first-hit
distances and the verification suite built on them.
"""

from dwsl.services.oracle.behavior import (
    EmpiricalBehavior,
    behavior_is_goal_persistent,
    complete_at_goal,
    dataset_goal_persistence,
    estimate_behavior,
    goal_persistent_behavior,
    uniform_behavior,
)
from dwsl.services.oracle.distances import (
    distance_soft_value,
    exact_distance_model,
    first_hit_distribution,
    first_hit_tables,
)
from dwsl.services.oracle.enumeration import (
    empirical_soft_value,
    return_atoms,
    truncation_horizon,
)
from dwsl.services.oracle.soft_values import (
    SoftValueTable,
    behavior_value,
    fixed_point_residual,
    optimal_kl_policy,
    soft_value_iteration,
)
from dwsl.services.oracle.suite import (
    DEFAULT_ALPHAS,
    DEFAULT_GAMMAS,
    SUITES,
    CheckResult,
    VerificationReport,
    brute_force_tabular,
    verify_suite,
    write_report,
)

__all__ = [
    "DEFAULT_ALPHAS",
    "DEFAULT_GAMMAS",
    "SUITES",
    "CheckResult",
    "EmpiricalBehavior",
    "SoftValueTable",
    "VerificationReport",
    "behavior_is_goal_persistent",
    "behavior_value",
    "brute_force_tabular",
    "complete_at_goal",
    "dataset_goal_persistence",
    "distance_soft_value",
    "empirical_soft_value",
    "estimate_behavior",
    "exact_distance_model",
    "first_hit_distribution",
    "first_hit_tables",
    "fixed_point_residual",
    "goal_persistent_behavior",
    "optimal_kl_policy",
    "return_atoms",
    "soft_value_iteration",
    "truncation_horizon",
    "uniform_behavior",
    "verify_suite",
    "write_report",
]
