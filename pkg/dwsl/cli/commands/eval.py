"""
eval command: roll out a saved policy checkpoint.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import click

from dwsl.cli.common import echo_record, reported_errors
from dwsl.config import CHECKPOINT_FORMAT_VERSION, EVAL_EPISODES, EVAL_STRATEGY
from dwsl.services.datagen import read_dataset
from dwsl.services.evaluation import GOAL_STRATEGIES, evaluate
from dwsl.services.policy import ACT_MODES, load_policy
from dwsl.utils.logging import logger
from dwsl.utils.records import read_record, write_record


def checkpoint_eval_settings(path: Path) -> Dict[str, Any]:
    """The [eval] and [data] settings a checkpoint was trained with, if recorded."""
    config = read_record(path, "policy", CHECKPOINT_FORMAT_VERSION).get("config", {})
    settings = dict(config.get("eval", {}))
    settings["dataset"] = config.get("data", {}).get("path")
    return settings


@click.command(name="eval")
@click.argument(
    "model_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option(
    "--episodes",
    type=click.IntRange(min=1),
    help="Number of episodes (default: training-time setting, else 100).",
)
@click.option(
    "--seed",
    type=int,
    help="Evaluation seed (default: training-time setting, else 0).",
)
@click.option(
    "--strategy",
    type=click.Choice(GOAL_STRATEGIES),
    help="Goal sampling strategy.",
)
@click.option(
    "--mode",
    type=click.Choice(ACT_MODES),
    help="Action selection.",
)
@click.option(
    "--dataset",
    "dataset_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Dataset providing goals for the dataset_states strategy.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the report record to this file.",
)
def eval_command(
    model_path: Path,
    episodes: Optional[int],
    seed: Optional[int],
    strategy: Optional[str],
    mode: Optional[str],
    dataset_path: Optional[Path],
    out: Optional[Path],
) -> None:
    """Evaluate a policy checkpoint and print its report."""
    logger.info(f"Starting eval command for {model_path}")
    with reported_errors():
        settings = checkpoint_eval_settings(model_path)
        policy = load_policy(model_path)
        dataset_path = dataset_path or settings.get("dataset")
        dataset = read_dataset(dataset_path) if dataset_path else None

        report = evaluate(
            policy.spec,
            policy,
            episodes or settings.get("episodes", EVAL_EPISODES),
            strategy=strategy or settings.get("strategy", EVAL_STRATEGY),
            seed=settings.get("seed", 0) if seed is None else seed,
            mode=mode or settings.get("mode", "greedy"),
            dataset=dataset,
        )
        record = {"model": model_path, **report.to_record()}
        if out is not None:
            write_record(out, record)
            logger.info(f"Report written to {out}")
    echo_record(record)
