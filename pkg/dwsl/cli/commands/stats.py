"""
stats command: return statistics of a dataset for one goal.
"""

from pathlib import Path
from typing import Optional

import click

from dwsl.cli.common import echo_record, reported_errors
from dwsl.services.datagen import dataset_stats, most_frequent_final_goal, read_dataset


@click.command()
@click.argument(
    "dataset_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option(
    "--goal",
    type=int,
    help="Goal id (default: the most frequent final goal).",
)
def stats(dataset_path: Path, goal: Optional[int]) -> None:
    """Print mean, median, p75 and p90 undiscounted returns for a goal."""
    with reported_errors():
        dataset = read_dataset(dataset_path)
        if goal is None:
            goal = most_frequent_final_goal(dataset)
        else:
            goal = dataset.spec.check_goal(goal)
        stats_record = dataset_stats(dataset, goal)
        echo_record({"dataset": dataset_path, "goal": goal, **stats_record})
