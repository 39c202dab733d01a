"""
train command: fit the distance model, extract the policy and record curves.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from pydantic import ValidationError

from dwsl.cli.common import echo_record, reported_errors
from dwsl.cli.run_config import RunConfig, load_run_config
from dwsl.config import REPORT_FORMAT_VERSION
from dwsl.services.datagen import Dataset, collect_dataset, parse_behavior, read_dataset
from dwsl.services.distance import save_distance_model
from dwsl.services.evaluation import EvalReport, emit_curves, evaluate
from dwsl.services.mdp import make_env
from dwsl.services.policy import MlpPolicy, PolicyModel, run_algorithm, save_policy
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import InputDomainError
from dwsl.utils.logging import logger
from dwsl.utils.records import write_record


def load_training_data(cfg: RunConfig) -> Dataset:
    """Read the configured dataset, or collect it from the [data] recipe."""
    spec = make_env(cfg.env.id, horizon=cfg.env.horizon, goal_map=cfg.env.goal_map)
    if cfg.data.path is not None:
        dataset = read_dataset(cfg.data.path)
        if dataset.spec.describe() != spec.describe():
            raise InputDomainError(
                f"dataset environment {dataset.spec.describe()} does not match "
                f"the configured {spec.describe()}"
            )
        return dataset
    policy = parse_behavior(spec, cfg.data.behavior, seed=cfg.data.seed)
    return collect_dataset(
        spec,
        policy,
        cfg.data.traj,
        cfg.data.seed,
        config=cfg.provenance(),
        progress=cfg.train.progress,
    )


def evaluate_run(cfg: RunConfig, dataset: Dataset, policy: PolicyModel) -> EvalReport:
    return evaluate(
        dataset.spec,
        policy,
        cfg.eval.episodes,
        strategy=cfg.eval.strategy,
        seed=cfg.eval.seed,
        mode=cfg.eval.mode,
        dataset=dataset,
    )


def train_run(cfg: RunConfig) -> Tuple[Dict[str, Any], List[Tuple[int, EvalReport]]]:
    """
    Run one configured experiment and write its artifacts to cfg.output.dir.

    Network policies are evaluated every cfg.eval.every steps and after the
    last step; closed-form tabular policies are evaluated once, at step 0.

    Returns:
        (run summary record, evaluation history)
    """
    dataset = load_training_data(cfg)
    spec = dataset.spec
    binning = BinningConfig.for_horizon(
        spec.horizon, cfg.binning.n_step, cfg.binning.achieved_as_one
    )

    history: List[Tuple[int, EvalReport]] = []

    def on_step(step: int, policy: PolicyModel) -> None:
        if step % cfg.eval.every == 0:
            history.append((step, evaluate_run(cfg, dataset, policy)))
            logger.info(f"step {step}: success {history[-1][1].success_rate:.3f}")

    distance_model, policy = run_algorithm(
        dataset, cfg.algorithm.name, cfg.algorithm.backend, binning, cfg.train, on_step
    )
    final_step = cfg.train.steps if isinstance(policy, MlpPolicy) else 0
    if not history or history[-1][0] != final_step:
        history.append((final_step, evaluate_run(cfg, dataset, policy)))

    out_dir = Path(cfg.output.dir)
    provenance = cfg.provenance()
    if distance_model is not None:
        save_distance_model(out_dir / "distance_model.json", distance_model, provenance)
    save_policy(out_dir / "policy.json", policy, provenance)
    emit_curves(history, out_dir / "curves.csv")

    summary = {
        "kind": "run_summary",
        "format_version": REPORT_FORMAT_VERSION,
        "config": provenance,
        "dataset": dataset.header.behavior,
        "training_fallbacks": policy.training_fallbacks,
        "final_step": history[-1][0],
        "eval": history[-1][1].to_record(),
    }
    write_record(out_dir / "run_summary.json", summary)
    logger.success(f"Run written to {out_dir}")
    return summary, history


@click.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="TOML run configuration.",
)
@click.option("--env", "env_id", help="Override [env] id.")
@click.option(
    "--dataset",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Override [data] path.",
)
@click.option("--algorithm", help="Override [algorithm] name.")
@click.option("--backend", help="Override [algorithm] backend.")
@click.option("--n-step", type=int, help="Override [binning] n_step.")
@click.option("--alpha", type=float, help="Override [train] alpha.")
@click.option("--beta", type=float, help="Override [train] beta.")
@click.option("--steps", type=int, help="Override [train] steps.")
@click.option("--seed", type=int, help="Override [train] seed.")
@click.option("--eval-episodes", type=int, help="Override [eval] episodes.")
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    help="Override [output] dir.",
)
@click.option(
    "--progress",
    is_flag=True,
    default=None,
    help="Show progress bars.",
)
def train(
    config_path: Optional[Path],
    env_id: Optional[str],
    dataset: Optional[Path],
    algorithm: Optional[str],
    backend: Optional[str],
    n_step: Optional[int],
    alpha: Optional[float],
    beta: Optional[float],
    steps: Optional[int],
    seed: Optional[int],
    eval_episodes: Optional[int],
    out: Optional[Path],
    progress: Optional[bool],
) -> None:
    """Train a policy from a run configuration and write checkpoints and curves."""
    overrides = {
        "env.id": env_id,
        "data.path": dataset,
        "algorithm.name": algorithm,
        "algorithm.backend": backend,
        "binning.n_step": n_step,
        "train.alpha": alpha,
        "train.beta": beta,
        "train.steps": steps,
        "train.seed": seed,
        "train.progress": progress,
        "eval.episodes": eval_episodes,
        "output.dir": out,
    }
    try:
        cfg = load_run_config(config_path, overrides)
    except ValidationError as e:
        raise click.BadParameter(str(e), param_hint="configuration") from e
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--config") from e

    logger.info(
        f"Starting train command: {cfg.algorithm.name} ({cfg.algorithm.backend}) "
        f"on {cfg.env.id}"
    )
    with reported_errors():
        summary, _ = train_run(cfg)
    echo_record(summary["eval"])
