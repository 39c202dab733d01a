"""
verify command: run the exact theory checks on a desk-scale environment.
"""

from pathlib import Path
from typing import Optional, Tuple

import click

from dwsl.cli.common import echo_record, reported_errors, validate_env
from dwsl.config import RUNS_DIR
from dwsl.services.datagen import collect_dataset, make_behavior_policy, read_dataset
from dwsl.services.mdp import make_env
from dwsl.services.oracle import (
    DEFAULT_ALPHAS,
    DEFAULT_GAMMAS,
    SUITES,
    verify_suite,
    write_report,
)
from dwsl.utils.logging import logger

@click.command()
@click.option(
    "--env",
    "env_id",
    required=True,
    callback=validate_env,
    help="Environment id.",
)
@click.option(
    "--horizon",
    type=click.IntRange(min=1),
    help="Episode length override.",
)
@click.option(
    "--suite",
    "suites",
    type=click.Choice(("all",) + SUITES),
    multiple=True,
    default=("all",),
    show_default=True,
    help="Check family to run (repeatable).",
)
@click.option(
    "--alpha",
    "alphas",
    type=click.FloatRange(min=0, min_open=True),
    multiple=True,
    help="Temperatures (repeatable; default 0.5, 1, 2).",
)
@click.option(
    "--gamma",
    "gammas",
    type=click.FloatRange(min=0, max=1, min_open=True, max_open=True),
    multiple=True,
    help="Discounts below 1 (repeatable; default 0.5, 0.9, 0.99).",
)
@click.option(
    "--dataset",
    "dataset_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Dataset for the data checks (default: collected with a greedy expert).",
)
@click.option(
    "--traj",
    type=click.IntRange(min=1),
    default=20,
    show_default=True,
    help="Trajectories to collect when no dataset is given.",
)
@click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    help="Collection seed.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Report file (default: data/runs/verify-<env>.jsonl).",
)
@click.pass_context
def verify(
    ctx: click.Context,
    env_id: str,
    horizon: Optional[int],
    suites: Tuple[str, ...],
    alphas: Tuple[float, ...],
    gammas: Tuple[float, ...],
    dataset_path: Optional[Path],
    traj: int,
    seed: int,
    out: Optional[Path],
) -> None:
    """Run verification checks and exit nonzero if any check fails."""
    logger.info(f"Starting verify command for {env_id}: {', '.join(suites)}")
    with reported_errors():
        if dataset_path is not None:
            dataset = read_dataset(dataset_path)
            spec = dataset.spec
        else:
            spec = make_env(env_id, horizon=horizon)
            dataset = None
            if "all" in suites or set(suites) & {"tabular", "softmin"}:
                expert = make_behavior_policy(
                    spec, "noisy_expert", seed=seed, epsilon=0.0
                )
                dataset = collect_dataset(spec, expert, traj, seed)

        report = verify_suite(
            spec,
            dataset=dataset,
            alphas=alphas or DEFAULT_ALPHAS,
            gammas=gammas or DEFAULT_GAMMAS,
            suites=suites,
        )
        out = out or RUNS_DIR / f"verify-{env_id}.jsonl"
        write_report(out, report)

    for record in report.records():
        echo_record(record)
    logger.info(f"Verification {report.counts()} written to {out}")
    if not report.passed:
        logger.error("Verification failed")
        ctx.exit(1)
