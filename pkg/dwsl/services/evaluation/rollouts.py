"""
Policy rollouts and evaluation reports.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from dwsl.config import EVAL_STRATEGY
from dwsl.services.datagen import Dataset, Trajectory
from dwsl.services.mdp import MdpSpec, reachable_goals
from dwsl.services.policy import PolicyModel, act
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger

GOAL_STRATEGIES = ("all_reachable", "dataset_states")


@dataclass(frozen=True)
class EpisodeResult:
    start: int
    goal: int
    success: bool
    first_hit: Optional[int]
    steps_at_goal: int
    fallbacks: int


@dataclass(frozen=True)
class EvalReport:
    """Aggregate metrics over evaluation episodes."""

    episodes: int
    success_rate: float
    mean_steps_at_goal: float
    mean_first_hit: float
    fallback_count: int
    seed: int = 0
    strategy: str = EVAL_STRATEGY
    mode: str = "greedy"

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        if not np.isfinite(self.mean_first_hit):
            record["mean_first_hit"] = None
        return record


def sample_eval_goal(
    spec: MdpSpec,
    strategy: str,
    rng: np.random.Generator,
    dataset: Optional[Dataset] = None,
) -> Tuple[int, int]:
    """
    Draw a (start, goal) pair for one evaluation episode.

    The start is uniform over the start states. 'all_reachable' draws the goal
    uniformly among goals reachable from the start; 'dataset_states' draws
    phi(s) for s uniform over the states visited in ``dataset``.
    """
    start = int(spec.start_states[rng.integers(len(spec.start_states))])
    if strategy == "all_reachable":
        goals = reachable_goals(spec, start)
        if len(goals) == 0:
            raise InputDomainError(f"no goal is reachable from state {start}")
        return start, int(goals[rng.integers(len(goals))])
    if strategy == "dataset_states":
        if dataset is None or len(dataset) == 0:
            raise InputDomainError(
                "dataset_states goal sampling needs a non-empty dataset"
            )
        visited = dataset.visited_states()
        return start, int(spec.goal_map[visited[rng.integers(len(visited))]])
    raise InputDomainError(
        f"unknown goal strategy '{strategy}'; "
        f"expected one of {', '.join(GOAL_STRATEGIES)}"
    )


def rollout(
    spec: MdpSpec,
    policy: PolicyModel,
    start: int,
    goal: int,
    horizon: int,
    mode: str,
    rng: np.random.Generator,
) -> Tuple[Trajectory, EpisodeResult]:
    """
    Run a policy for exactly ``horizon`` steps.

    first_hit is the first t in [0, horizon] with phi(s_t) = goal;
    steps_at_goal counts t in [0, horizon - 1] with phi(s_t) = goal.
    """
    states = [spec.check_state(start)]
    actions = []
    fallbacks = 0
    for t in range(horizon):
        a, fallback = act(policy, states[-1], goal, mode, rng, t)
        fallbacks += int(fallback)
        actions.append(a)
        states.append(int(spec.transitions[states[-1], a]))

    at_goal = spec.goal_map[np.asarray(states)] == goal
    hits = np.flatnonzero(at_goal)
    first_hit = int(hits[0]) if len(hits) else None
    result = EpisodeResult(
        start=int(start),
        goal=int(goal),
        success=first_hit is not None,
        first_hit=first_hit,
        steps_at_goal=int(at_goal[:horizon].sum()),
        fallbacks=fallbacks,
    )
    return Trajectory(states=tuple(states), actions=tuple(actions)), result


def summarize(
    results: Sequence[EpisodeResult], seed: int, strategy: str, mode: str
) -> EvalReport:
    successes = [r.first_hit for r in results if r.success]
    return EvalReport(
        episodes=len(results),
        success_rate=len(successes) / len(results),
        mean_steps_at_goal=float(np.mean([r.steps_at_goal for r in results])),
        mean_first_hit=float(np.mean(successes)) if successes else float("nan"),
        fallback_count=int(sum(r.fallbacks for r in results)),
        seed=seed,
        strategy=strategy,
        mode=mode,
    )


def evaluate(
    spec: MdpSpec,
    policy: PolicyModel,
    episodes: int,
    strategy: str = EVAL_STRATEGY,
    seed: int = 0,
    mode: str = "greedy",
    dataset: Optional[Dataset] = None,
    tasks: Optional[Sequence[Tuple[int, int]]] = None,
    horizon: Optional[int] = None,
) -> EvalReport:
    """
    Evaluate a policy over seeded episodes.

    Episode e uses the random stream seeded with (seed, e), so the report is a
    pure function of the arguments.

    Args:
        spec: The environment
        policy: Policy to evaluate
        episodes: Number of episodes
        strategy: Goal sampling strategy
        seed: Evaluation seed
        mode: 'greedy' or 'sample'
        dataset: Source of goals for 'dataset_states'
        tasks: Fixed (start, goal) pairs cycled over episodes instead of sampling
        horizon: Episode length (defaults to spec.horizon)

    Returns:
        EvalReport
    """
    if episodes < 1:
        raise InputDomainError(f"episodes must be at least 1, got {episodes}")
    horizon = horizon or spec.horizon
    results: List[EpisodeResult] = []
    for e in range(episodes):
        rng = np.random.default_rng([seed, e])
        if tasks:
            start, goal = tasks[e % len(tasks)]
        else:
            start, goal = sample_eval_goal(spec, strategy, rng, dataset)
        _, result = rollout(spec, policy, start, goal, horizon, mode, rng)
        results.append(result)
    report = summarize(results, seed, strategy, mode)
    logger.debug(
        f"Evaluated {episodes} episodes: success {report.success_rate:.3f}, "
        f"fallbacks {report.fallback_count}"
    )
    return report
