"""
Offline trajectory collection with scripted behavior policies.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from tqdm import tqdm

from dwsl.services.datagen.behavior import BehaviorPolicy
from dwsl.services.datagen.dataset import (
    Dataset,
    DatasetHeader,
    Trajectory,
    validate_trajectory,
)
from dwsl.services.mdp import MdpSpec, reachable_goals
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger


@dataclass(frozen=True)
class TaskFamily:
    """
    Restricts an episode's start state and commanded goal.

    Episodes of a family start uniformly in ``starts`` and command a goal
    drawn uniformly from ``goals`` among those reachable from the start.
    """

    starts: Sequence[int]
    goals: Sequence[int]


def _sample_task(spec: MdpSpec, rng: np.random.Generator, family: Optional[TaskFamily]):
    starts = spec.start_states if family is None else tuple(family.starts)
    start = int(starts[rng.integers(len(starts))])
    goals = reachable_goals(spec, start)
    if family is not None:
        goals = np.intersect1d(goals, np.asarray(family.goals, dtype=int))
    if len(goals) == 0:
        raise InputDomainError(f"no commanded goal is reachable from state {start}")
    return start, int(goals[rng.integers(len(goals))])


def rollout_behavior(
    spec: MdpSpec,
    policy: BehaviorPolicy,
    start: int,
    goal: int,
    rng: np.random.Generator,
    random_episode: bool = False,
) -> Trajectory:
    """Roll a behavior policy for exactly spec.horizon steps."""
    states = [spec.check_state(start)]
    actions = []
    for _ in range(spec.horizon):
        probs = policy.action_probs(spec, states[-1], goal, random_episode)
        a = int(rng.choice(spec.num_actions, p=probs))
        actions.append(a)
        states.append(int(spec.transitions[states[-1], a]))
    return Trajectory(states=tuple(states), actions=tuple(actions))


def collect_dataset(
    spec: MdpSpec,
    policy: BehaviorPolicy,
    num_traj: int,
    seed: int,
    tasks: Optional[Sequence[TaskFamily]] = None,
    config: Optional[Dict] = None,
    progress: bool = False,
) -> Dataset:
    """
    Collect an offline dataset by rolling the behavior policy.

    Each episode e owns the RNG stream seeded with seed + e: it draws a start
    state and a commanded goal, then acts for exactly spec.horizon steps.
    Commanded goals are discarded.

    Args:
        spec: The environment
        policy: Behavior policy
        num_traj: Number of episodes
        seed: Base seed
        tasks: Optional task families; each episode picks one uniformly
        config: Provenance recorded in the header
        progress: Show a tqdm progress bar

    Returns:
        The collected dataset
    """
    if num_traj < 1:
        raise InputDomainError(f"num_traj must be at least 1, got {num_traj}")
    if tasks is not None and len(tasks) == 0:
        raise InputDomainError("task family list must be non-empty")

    logger.info(
        f"Collecting {num_traj} trajectories on {spec.env_id} "
        f"with {policy.describe()} (seed {seed})"
    )
    random_flags = policy.random_episodes(num_traj)
    trajectories = []
    for e in tqdm(range(num_traj), desc="Collecting", disable=not progress):
        rng = np.random.default_rng(seed + e)
        family = None if tasks is None else tasks[int(rng.integers(len(tasks)))]
        start, goal = _sample_task(spec, rng, family)
        trajectories.append(
            rollout_behavior(spec, policy, start, goal, rng, bool(random_flags[e]))
        )

    header = DatasetHeader(
        env_id=spec.env_id,
        horizon=spec.horizon,
        num_trajectories=num_traj,
        behavior=policy.describe(),
        seed=seed,
        goal_map=spec.goal_map_name,
        config=dict(config or {}),
    )
    logger.debug(f"{int(random_flags.sum())} of {num_traj} episodes were random")
    return Dataset(spec=spec, header=header, trajectories=tuple(trajectories))


def make_dataset(
    spec: MdpSpec,
    trajectories: Sequence[Sequence[Sequence[int]]],
    behavior: str = "manual",
    seed: int = 0,
) -> Dataset:
    """
    Build a dataset from explicit (states, actions) pairs.

    Every trajectory must replay under the environment and hold between one
    and spec.horizon actions.
    """
    built = []
    for states, actions in trajectories:
        traj = Trajectory(
            states=tuple(int(s) for s in states),
            actions=tuple(int(a) for a in actions),
        )
        validate_trajectory(spec, traj)
        if not 1 <= traj.horizon <= spec.horizon:
            raise InputDomainError(
                f"trajectory length {traj.horizon} outside [1, {spec.horizon}]"
            )
        built.append(traj)
    header = DatasetHeader(
        env_id=spec.env_id,
        horizon=spec.horizon,
        num_trajectories=len(built),
        behavior=behavior,
        seed=seed,
        goal_map=spec.goal_map_name,
    )
    return Dataset(spec=spec, header=header, trajectories=tuple(built))
