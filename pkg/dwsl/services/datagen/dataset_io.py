"""
Line-delimited dataset files.

Line 1 holds the header record; each following line holds one trajectory
record ``{"actions": [...], "states": [...]}``.
"""

from pathlib import Path
from typing import Any, Dict, List

from dwsl.config import DATASET_FORMAT_VERSION
from dwsl.services.datagen.dataset import (
    Dataset,
    DatasetHeader,
    Trajectory,
    validate_trajectory,
)
from dwsl.services.mdp import is_registered, make_env
from dwsl.utils.errors import DatasetFormatError, DwslError
from dwsl.utils.logging import logger
from dwsl.utils.records import dumps_record, parse_line, read_text_lines

_HEADER_FIELDS = ("env_id", "horizon", "num_trajectories", "behavior", "seed")


def header_record(header: DatasetHeader) -> Dict[str, Any]:
    return {
        "kind": "dataset",
        "format_version": header.format_version,
        "env_id": header.env_id,
        "horizon": header.horizon,
        "goal_map": header.goal_map,
        "num_trajectories": header.num_trajectories,
        "behavior": header.behavior,
        "seed": header.seed,
        "config": header.config,
    }


def write_dataset(path: Path, dataset: Dataset) -> Path:
    """
    Write a dataset file.

    Args:
        path: Destination (parent directories are created)
        dataset: Dataset to write

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_record(header_record(dataset.header)) + "\n")
        for traj in dataset.trajectories:
            record = {"states": list(traj.states), "actions": list(traj.actions)}
            f.write(dumps_record(record) + "\n")
    logger.info(f"Wrote {len(dataset)} trajectories to {path}")
    return path


def _parse_header(record: Dict[str, Any]) -> DatasetHeader:
    if record.get("kind", "dataset") != "dataset":
        raise DatasetFormatError(
            f"not a dataset header: kind {record.get('kind')!r}", line=1
        )
    version = record.get("format_version")
    if version != DATASET_FORMAT_VERSION:
        raise DatasetFormatError(
            f"unsupported format_version {version!r} "
            f"(expected {DATASET_FORMAT_VERSION})",
            line=1,
        )
    missing = [name for name in _HEADER_FIELDS if name not in record]
    if missing:
        raise DatasetFormatError(f"header missing {', '.join(missing)}", line=1)
    if not is_registered(str(record["env_id"])):
        raise DatasetFormatError(
            f"environment '{record['env_id']}' is not in the registry", line=1
        )
    return DatasetHeader(
        env_id=str(record["env_id"]),
        horizon=int(record["horizon"]),
        num_trajectories=int(record["num_trajectories"]),
        behavior=str(record["behavior"]),
        seed=int(record["seed"]),
        goal_map=str(record.get("goal_map", "identity")),
        format_version=version,
        config=dict(record.get("config") or {}),
    )


def _parse_trajectory(record: Dict[str, Any], line: int) -> Trajectory:
    states, actions = record.get("states"), record.get("actions")
    if not isinstance(states, list) or not isinstance(actions, list):
        raise DatasetFormatError(
            "trajectory record needs 'states' and 'actions' lists", line
        )
    values = states + actions
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise DatasetFormatError("states and actions must be integers", line)
    return Trajectory(states=tuple(states), actions=tuple(actions))


def read_dataset(path: Path) -> Dataset:
    """
    Read a dataset file written by write_dataset.

    The header is validated (version, registry) before any trajectory is
    parsed; every trajectory must replay under the rebuilt environment.

    Raises:
        DatasetFormatError: With the 1-based line number of the offending record
    """
    path = Path(path)
    lines = read_text_lines(path)
    if not lines:
        raise DatasetFormatError("empty dataset file", line=1)

    header = _parse_header(parse_line(lines[0], 1))
    try:
        spec = make_env(header.env_id, horizon=header.horizon, goal_map=header.goal_map)
    except DwslError as e:
        raise DatasetFormatError(str(e), line=1) from e

    trajectories: List[Trajectory] = []
    for number, text in enumerate(lines[1:], start=2):
        traj = _parse_trajectory(parse_line(text, number), number)
        try:
            validate_trajectory(spec, traj)
        except DwslError as e:
            raise DatasetFormatError(str(e), line=number) from e
        if not 1 <= traj.horizon <= spec.horizon:
            raise DatasetFormatError(
                f"trajectory length {traj.horizon} outside [1, {spec.horizon}]", number
            )
        trajectories.append(traj)

    if len(trajectories) != header.num_trajectories:
        raise DatasetFormatError(
            f"header announces {header.num_trajectories} trajectories, "
            f"found {len(trajectories)}",
            line=len(lines) + 1,
        )
    logger.debug(f"Read {len(trajectories)} trajectories from {path}")
    return Dataset(spec=spec, header=header, trajectories=tuple(trajectories))
