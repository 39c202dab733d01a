"""
Distance model checkpoint files.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from dwsl.config import CHECKPOINT_FORMAT_VERSION
from dwsl.services.distance.models import (
    ClassifierDistanceModel,
    DistanceModel,
    RegressionDistanceModel,
    TabularDistanceModel,
)
from dwsl.services.mdp import make_env
from dwsl.services.nn import mlp_from_record, mlp_to_record
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import DatasetFormatError
from dwsl.utils.records import read_record, write_record

KIND = "distance_model"


def distance_model_record(
    model: DistanceModel, config: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "kind": KIND,
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "backend": model.backend,
        "env": model.spec.describe(),
        "binning": model.binning.describe(),
        "config": dict(config or {}),
    }
    if isinstance(model, TabularDistanceModel):
        states, goals = np.nonzero(model.support)
        entries = []
        for s, g in zip(states, goals):
            bins = np.flatnonzero(model.probs[s, g])
            masses = model.probs[s, g, bins].tolist()
            entries.append([int(s), int(g), bins.tolist(), masses])
        record["entries"] = entries
    elif isinstance(model, ClassifierDistanceModel):
        record["features"] = model.features
        record["network"] = mlp_to_record(model.net)
    elif isinstance(model, RegressionDistanceModel):
        record["features"] = model.features
        record["mode"] = model.mode
        record["tau"] = model.tau
        record["network"] = mlp_to_record(model.net)
    return record


def save_distance_model(
    path: Path, model: DistanceModel, config: Optional[Dict[str, Any]] = None
) -> Path:
    return write_record(path, distance_model_record(model, config))


def load_distance_model(path: Path) -> DistanceModel:
    """
    Rebuild a distance model from its checkpoint.

    Raises:
        DatasetFormatError: For an unknown backend or a malformed record
    """
    record = read_record(path, KIND, CHECKPOINT_FORMAT_VERSION)
    try:
        spec = make_env(**record["env"])
        binning = BinningConfig(**record["binning"])
        backend = record["backend"]
        if backend == TabularDistanceModel.backend:
            probs = np.zeros((spec.num_states, spec.goal_count, binning.num_bins))
            support = np.zeros((spec.num_states, spec.goal_count), dtype=bool)
            for s, g, bins, values in record["entries"]:
                probs[s, g, bins] = values
                support[s, g] = True
            return TabularDistanceModel(spec, binning, probs, support)
        net = mlp_from_record(record["network"])
        if backend == ClassifierDistanceModel.backend:
            return ClassifierDistanceModel(spec, binning, net, record["features"])
        if backend == RegressionDistanceModel.backend:
            return RegressionDistanceModel(
                spec, binning, net, record["features"], record["mode"], record["tau"]
            )
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetFormatError(f"malformed distance checkpoint: {e}", line=1) from e
    raise DatasetFormatError(f"unknown distance backend '{backend}'", line=1)
