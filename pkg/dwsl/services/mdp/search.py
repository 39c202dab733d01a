"""
Breadth-first shortest-path oracle over the transition table.
"""

from collections import deque
from functools import lru_cache
from typing import Optional

import numpy as np

from dwsl.services.mdp.environments import MdpSpec

UNREACHABLE = -1


@lru_cache(maxsize=32)
def distance_table(spec: MdpSpec) -> np.ndarray:
    """
    All-pairs shortest step counts from every state to every goal.

    Runs one backward BFS per goal, seeded with every state whose goal
    extraction equals that goal.

    Args:
        spec: The environment

    Returns:
        Integer array (num_states, goal_count); UNREACHABLE where no path exists
    """
    table = np.full((spec.num_states, spec.goal_count), UNREACHABLE, dtype=int)
    predecessors = spec.predecessors
    for g in range(spec.goal_count):
        frontier = deque(int(s) for s in np.flatnonzero(spec.goal_map == g))
        for s in frontier:
            table[s, g] = 0
        while frontier:
            current = frontier.popleft()
            for prev in predecessors[current]:
                if table[prev, g] == UNREACHABLE:
                    table[prev, g] = table[current, g] + 1
                    frontier.append(prev)
    table.flags.writeable = False
    return table


def shortest_distance(spec: MdpSpec, s: int, g: int) -> Optional[int]:
    """
    Minimum number of actions needed to reach a state achieving goal g.

    Returns:
        Step count, or None when g is unreachable from s
    """
    value = int(distance_table(spec)[spec.check_state(s), spec.check_goal(g)])
    return None if value == UNREACHABLE else value


def reachable_goals(spec: MdpSpec, s: int) -> np.ndarray:
    """Goal ids reachable from s, in increasing order."""
    return np.flatnonzero(distance_table(spec)[spec.check_state(s)] != UNREACHABLE)


def optimal_action(spec: MdpSpec, s: int, g: int) -> Optional[int]:
    """
    Lowest-id action on a shortest path from s toward g.

    At a goal-achieving state the stationary action is returned.

    Returns:
        Action id, or None when g is unreachable from s
    """
    table = distance_table(spec)
    d = int(table[s, g])
    if d == UNREACHABLE:
        return None
    if d == 0:
        return int(spec.stationary_actions[s])
    next_distances = table[spec.transitions[s], g]
    for a, d_next in enumerate(next_distances):
        if d_next == d - 1:
            return a
    return None


@lru_cache(maxsize=32)
def optimal_action_table(spec: MdpSpec) -> np.ndarray:
    """
    Lowest-id shortest-path action for every (state, goal) pair.

    Returns:
        Integer array (num_states, goal_count); UNREACHABLE where g cannot be reached
    """
    table = np.full((spec.num_states, spec.goal_count), UNREACHABLE, dtype=int)
    for s in range(spec.num_states):
        for g in range(spec.goal_count):
            a = optimal_action(spec, s, g)
            if a is not None:
                table[s, g] = a
    table.flags.writeable = False
    return table
