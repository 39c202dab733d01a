"""
Deterministic goal-conditioned MDPs and the built-in environment registry.
"""

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dwsl.services.mdp.layouts import LAYOUTS, parse_layout
from dwsl.utils.errors import InputDomainError

CHAIN_ACTIONS = ("left", "right", "stay")
GRID_ACTIONS = ("up", "down", "left", "right", "stay")
GOAL_MAPS = ("identity", "coarse")

_CHAIN_PATTERN = re.compile(r"^chain-(\d+)$")
_GRID_PATTERN = re.compile(r"^grid-(\d+)x(\d+)$")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class MdpSpec:
    """
    Immutable description of a deterministic finite-horizon goal-conditioned MDP.

    Attributes:
        env_id: Registry identifier the spec was built from
        horizon: Episode length T
        transitions: Integer array (num_states, num_actions), f(s, a)
        goal_map: Integer array (num_states,), phi(s)
        goal_count: Number of distinct goal ids
        start_states: Non-empty tuple of start states
        stationary_actions: Integer array (num_states,), an action with f(s, a) = s
        state_features: Array (num_states, d_s) with values in [0, 1]
        goal_features: Array (goal_count, d_g) with values in [0, 1]
        action_names: Human-readable action labels
        goal_map_name: Which goal extraction function was used
    """

    env_id: str
    horizon: int
    transitions: np.ndarray
    goal_map: np.ndarray
    goal_count: int
    start_states: Tuple[int, ...]
    stationary_actions: np.ndarray
    state_features: np.ndarray
    goal_features: np.ndarray
    action_names: Tuple[str, ...]
    goal_map_name: str = "identity"
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for name in (
            "transitions",
            "goal_map",
            "stationary_actions",
            "state_features",
            "goal_features",
        ):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        self._validate()

    def _validate(self) -> None:
        S, A = self.transitions.shape
        if S < 1 or A < 1:
            raise InputDomainError("an MDP needs at least one state and one action")
        if self.horizon < 1:
            raise InputDomainError(f"horizon must be positive, got {self.horizon}")
        if self.transitions.min() < 0 or self.transitions.max() >= S:
            raise InputDomainError("transition table maps outside the state space")
        if self.goal_map.shape != (S,):
            raise InputDomainError("goal map must assign a goal to every state")
        if self.goal_map.min() < 0 or self.goal_map.max() >= self.goal_count:
            raise InputDomainError("goal map produces ids outside [0, goal_count)")
        stay = self.transitions[np.arange(S), self.stationary_actions]
        if not np.array_equal(stay, np.arange(S)):
            raise InputDomainError("every state needs a stationary action")
        if not self.start_states:
            raise InputDomainError("start state set must be non-empty")
        if len(self.action_names) != A:
            raise InputDomainError("one action name per action is required")

    @property
    def num_states(self) -> int:
        return int(self.transitions.shape[0])

    @property
    def num_actions(self) -> int:
        return int(self.transitions.shape[1])

    @cached_property
    def predecessors(self) -> List[List[int]]:
        """For every state, the states with some action leading into it."""
        preds: List[set] = [set() for _ in range(self.num_states)]
        for s in range(self.num_states):
            for s_next in self.transitions[s]:
                preds[int(s_next)].add(s)
        return [sorted(p) for p in preds]

    @cached_property
    def goal_achieved(self) -> np.ndarray:
        """Boolean array (num_states, goal_count): phi(s) == g."""
        table = np.zeros((self.num_states, self.goal_count), dtype=bool)
        table[np.arange(self.num_states), self.goal_map] = True
        table.flags.writeable = False
        return table

    def check_state(self, s: int) -> int:
        if not 0 <= int(s) < self.num_states:
            raise InputDomainError(
                f"state {s} outside [0, {self.num_states}) for {self.env_id}"
            )
        return int(s)

    def check_action(self, a: int) -> int:
        if not 0 <= int(a) < self.num_actions:
            raise InputDomainError(
                f"action {a} outside [0, {self.num_actions}) for {self.env_id}"
            )
        return int(a)

    def check_goal(self, g: int) -> int:
        if not 0 <= int(g) < self.goal_count:
            raise InputDomainError(
                f"goal {g} outside [0, {self.goal_count}) for {self.env_id}"
            )
        return int(g)

    def describe(self) -> Dict[str, object]:
        """Reference needed to rebuild this spec from the registry."""
        return {
            "env_id": self.env_id,
            "horizon": self.horizon,
            "goal_map": self.goal_map_name,
        }


def step(spec: MdpSpec, s: int, a: int) -> int:
    """Apply the deterministic transition f(s, a)."""
    return int(spec.transitions[spec.check_state(s), spec.check_action(a)])


def reward(spec: MdpSpec, s: int, a: int, s_next: int, g: int) -> int:
    """Sparse goal-reaching reward: 0 if phi(s_next) == g, else -1."""
    spec.check_state(s)
    spec.check_action(a)
    s_next = spec.check_state(s_next)
    g = spec.check_goal(g)
    return 0 if int(spec.goal_map[s_next]) == g else -1


def reward_table(spec: MdpSpec) -> np.ndarray:
    """Array (num_states, num_actions, goal_count) of sparse rewards."""
    achieved = spec.goal_achieved[spec.transitions]
    return np.where(achieved, 0.0, -1.0)


def _scaled(values: np.ndarray, size: int) -> np.ndarray:
    return values / (size - 1) if size > 1 else np.zeros_like(values, dtype=float)


def chain_env(
    length: int, horizon: Optional[int] = None, goal_map: str = "identity"
) -> MdpSpec:
    """
    Build a chain of ``length`` states with actions left, right and stay.

    Args:
        length: Number of states on the line
        horizon: Episode length (defaults to 2 * length)
        goal_map: 'identity' or 'coarse' (phi(s) = s // 2)
    """
    if length < 1:
        raise InputDomainError("chain length must be positive")
    states = np.arange(length)
    transitions = np.stack(
        [np.maximum(states - 1, 0), np.minimum(states + 1, length - 1), states],
        axis=1,
    )
    positions = _scaled(states.astype(float), length)
    if goal_map == "identity":
        phi = states.copy()
        goal_features = positions[:, None]
    elif goal_map == "coarse":
        phi = states // 2
        goal_count = int(phi.max()) + 1
        goal_features = _scaled(np.arange(goal_count, dtype=float), goal_count)[:, None]
    else:
        raise InputDomainError(f"unknown goal map '{goal_map}'")
    return MdpSpec(
        env_id=f"chain-{length}",
        horizon=horizon or 2 * length,
        transitions=transitions,
        goal_map=phi,
        goal_count=int(phi.max()) + 1,
        start_states=tuple(int(s) for s in states),
        stationary_actions=np.full(length, 2),
        state_features=positions[:, None],
        goal_features=goal_features,
        action_names=CHAIN_ACTIONS,
        goal_map_name=goal_map,
    )


def grid_env(
    width: int,
    height: int,
    walls: Optional[Sequence[Sequence[bool]]] = None,
    horizon: Optional[int] = None,
    goal_map: str = "identity",
    env_id: Optional[str] = None,
) -> MdpSpec:
    """
    Build a 4-connected grid with an optional wall bitmap.

    Free cells become states in row-major order. Moves into walls or off the
    grid leave the state unchanged.

    Args:
        width: Number of columns
        height: Number of rows
        walls: Optional bitmap indexed [row][col], True for a wall
        horizon: Episode length (defaults to 2 * (width + height))
        goal_map: 'identity' or 'coarse' (phi(s) = column index)
        env_id: Registry identifier (defaults to grid-WxH)
    """
    if width < 1 or height < 1:
        raise InputDomainError("grid dimensions must be positive")
    blocked = np.zeros((height, width), dtype=bool)
    if walls is not None:
        blocked = np.asarray(walls, dtype=bool)
        if blocked.shape != (height, width):
            raise InputDomainError("wall bitmap does not match grid dimensions")

    cells = [(r, c) for r in range(height) for c in range(width) if not blocked[r, c]]
    if not cells:
        raise InputDomainError("grid has no free cells")
    index = {cell: i for i, cell in enumerate(cells)}
    moves = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))

    transitions = np.zeros((len(cells), len(moves)), dtype=int)
    for i, (r, c) in enumerate(cells):
        for a, (dr, dc) in enumerate(moves):
            transitions[i, a] = index.get((r + dr, c + dc), i)

    rows = np.array([r for r, _ in cells], dtype=float)
    cols = np.array([c for _, c in cells], dtype=float)
    state_features = np.stack([_scaled(rows, height), _scaled(cols, width)], axis=1)

    if goal_map == "identity":
        phi = np.arange(len(cells))
        goal_features = state_features
    elif goal_map == "coarse":
        phi = cols.astype(int)
        used = np.unique(phi)
        # Columns that are entirely walls would leave holes in the goal ids
        remap = {int(c): i for i, c in enumerate(used)}
        phi = np.array([remap[int(c)] for c in phi])
        goal_features = _scaled(used.astype(float), width)[:, None]
    else:
        raise InputDomainError(f"unknown goal map '{goal_map}'")

    return MdpSpec(
        env_id=env_id or f"grid-{width}x{height}",
        horizon=horizon or 2 * (width + height),
        transitions=transitions,
        goal_map=phi,
        goal_count=int(phi.max()) + 1,
        start_states=tuple(range(len(cells))),
        stationary_actions=np.full(len(cells), 4),
        state_features=state_features,
        goal_features=goal_features,
        action_names=GRID_ACTIONS,
        goal_map_name=goal_map,
        metadata={"cells": tuple(cells), "width": width, "height": height},
    )


def layout_env(
    name: str, horizon: Optional[int] = None, goal_map: str = "identity"
) -> MdpSpec:
    """Build a grid environment from one of the embedded wall maps."""
    width, height, walls = parse_layout(LAYOUTS[name])
    return grid_env(
        width,
        height,
        walls=walls,
        horizon=horizon or 60,
        goal_map=goal_map,
        env_id=name,
    )


def registered_envs() -> List[str]:
    """Identifiers (and identifier patterns) accepted by make_env."""
    return ["chain-<N>", "grid-<W>x<H>"] + sorted(LAYOUTS)


def is_registered(env_id: str) -> bool:
    return bool(
        _CHAIN_PATTERN.match(env_id) or _GRID_PATTERN.match(env_id) or env_id in LAYOUTS
    )


def make_env(
    env_id: str, horizon: Optional[int] = None, goal_map: str = "identity"
) -> MdpSpec:
    """
    Resolve an environment identifier in the registry.

    Args:
        env_id: 'chain-N', 'grid-WxH' or a named layout such as 'four-rooms'
        horizon: Optional episode length override
        goal_map: 'identity' or 'coarse'

    Returns:
        The corresponding MdpSpec
    """
    match = _CHAIN_PATTERN.match(env_id)
    if match:
        return chain_env(int(match.group(1)), horizon=horizon, goal_map=goal_map)
    match = _GRID_PATTERN.match(env_id)
    if match:
        return grid_env(
            int(match.group(1)),
            int(match.group(2)),
            horizon=horizon,
            goal_map=goal_map,
        )
    if env_id in LAYOUTS:
        return layout_env(env_id, horizon=horizon, goal_map=goal_map)
    raise InputDomainError(
        f"unknown environment '{env_id}'; registered: {', '.join(registered_envs())}"
    )


def pair_features(
    spec: MdpSpec, states: np.ndarray, goals: np.ndarray, kind: str = "coordinates"
) -> np.ndarray:
    """
    Goal-conditioned input features, state features concatenated with goal features.

    Args:
        spec: The environment
        states: Integer array of states
        goals: Integer array of goals (same length)
        kind: 'coordinates' (normalised positions) or 'onehot'

    Returns:
        Float array (n, d_s + d_g)
    """
    states = np.asarray(states, dtype=int)
    goals = np.asarray(goals, dtype=int)
    if kind == "coordinates":
        return np.concatenate(
            [spec.state_features[states], spec.goal_features[goals]], axis=1
        )
    if kind == "onehot":
        features = np.zeros((len(states), spec.num_states + spec.goal_count))
        rows = np.arange(len(states))
        features[rows, states] = 1.0
        features[rows, spec.num_states + goals] = 1.0
        return features
    raise InputDomainError(f"unknown feature kind '{kind}'")


def feature_size(spec: MdpSpec, kind: str = "coordinates") -> int:
    if kind == "coordinates":
        return spec.state_features.shape[1] + spec.goal_features.shape[1]
    return spec.num_states + spec.goal_count
