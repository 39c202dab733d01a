"""
Deterministic goal-conditioned environments and their shortest-path oracle.
"""

from dwsl.services.mdp.environments import (
    CHAIN_ACTIONS,
    GOAL_MAPS,
    GRID_ACTIONS,
    MdpSpec,
    chain_env,
    feature_size,
    grid_env,
    is_registered,
    layout_env,
    make_env,
    pair_features,
    registered_envs,
    reward,
    reward_table,
    step,
)
from dwsl.services.mdp.search import (
    UNREACHABLE,
    distance_table,
    optimal_action,
    optimal_action_table,
    reachable_goals,
    shortest_distance,
)

__all__ = [
    "CHAIN_ACTIONS",
    "GOAL_MAPS",
    "GRID_ACTIONS",
    "MdpSpec",
    "UNREACHABLE",
    "chain_env",
    "distance_table",
    "feature_size",
    "grid_env",
    "is_registered",
    "layout_env",
    "make_env",
    "optimal_action",
    "optimal_action_table",
    "pair_features",
    "reachable_goals",
    "registered_envs",
    "reward",
    "reward_table",
    "shortest_distance",
    "step",
]
