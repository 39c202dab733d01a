"""
gen-data command: collect an offline dataset with a behavior policy.
"""

from pathlib import Path
from typing import Optional

import click

from dwsl.cli.common import echo_record, reported_errors, validate_env
from dwsl.config import DATASETS_DIR
from dwsl.services.datagen import (
    collect_dataset,
    dataset_stats,
    most_frequent_final_goal,
    parse_behavior,
    write_dataset,
)
from dwsl.services.mdp import GOAL_MAPS, make_env
from dwsl.utils.logging import logger


@click.command(name="gen-data")
@click.option(
    "--env",
    "env_id",
    required=True,
    callback=validate_env,
    help="Environment id, e.g. chain-5, grid-5x5 or four-rooms.",
)
@click.option(
    "--horizon",
    type=click.IntRange(min=1),
    help="Episode length override.",
)
@click.option(
    "--goal-map",
    type=click.Choice(GOAL_MAPS),
    default="identity",
    show_default=True,
    help="Goal extraction function.",
)
@click.option(
    "--behavior",
    default="random",
    show_default=True,
    help="random, noisy_expert:<eps> or mixture:<rho>:<eps>.",
)
@click.option(
    "--traj",
    type=click.IntRange(min=1),
    default=100,
    show_default=True,
    help="Number of trajectories.",
)
@click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    help="Base seed.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Output dataset file (default: data/datasets/<env>-<seed>.jsonl).",
)
@click.option(
    "--goal",
    type=int,
    help="Goal for the printed return statistics.",
)
@click.option(
    "--progress",
    is_flag=True,
    default=False,
    help="Show a progress bar.",
)
def gen_data(
    env_id: str,
    horizon: Optional[int],
    goal_map: str,
    behavior: str,
    traj: int,
    seed: int,
    out: Optional[Path],
    goal: Optional[int],
    progress: bool,
) -> None:
    """Collect trajectories and write them as a dataset file."""
    logger.info(f"Starting gen-data command for {env_id}")
    with reported_errors():
        spec = make_env(env_id, horizon=horizon, goal_map=goal_map)
        try:
            policy = parse_behavior(spec, behavior, seed=seed)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--behavior") from e

        config = {
            "env": spec.describe(),
            "behavior": policy.describe(),
            "traj": traj,
            "seed": seed,
        }
        dataset = collect_dataset(
            spec, policy, traj, seed, config=config, progress=progress
        )
        out = out or DATASETS_DIR / f"{env_id}-{seed}.jsonl"
        write_dataset(out, dataset)
        logger.success(f"Wrote {traj} trajectories to {out}")

        if goal is None:
            goal = most_frequent_final_goal(dataset)
        else:
            goal = spec.check_goal(goal)
        echo_record({"dataset": out, "goal": goal, **dataset_stats(dataset, goal)})
