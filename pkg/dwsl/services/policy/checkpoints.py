"""
Policy checkpoint files.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from dwsl.config import CHECKPOINT_FORMAT_VERSION
from dwsl.services.mdp import make_env
from dwsl.services.nn import mlp_from_record, mlp_to_record
from dwsl.services.policy.models import MlpPolicy, PolicyModel, TabularPolicy
from dwsl.utils.errors import DatasetFormatError
from dwsl.utils.records import read_record, write_record

KIND = "policy"


def policy_record(
    policy: PolicyModel, config: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "kind": KIND,
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "backend": policy.backend,
        "env": policy.spec.describe(),
        "training_fallbacks": policy.training_fallbacks,
        "config": dict(config or {}),
    }
    if isinstance(policy, TabularPolicy):
        record["time_steps"] = policy.probs.shape[0] if policy.time_indexed else None
        index = np.argwhere(policy.support)
        record["entries"] = [
            [*map(int, key), policy.probs[tuple(key)].tolist()] for key in index
        ]
    elif isinstance(policy, MlpPolicy):
        record["features"] = policy.features
        record["network"] = mlp_to_record(policy.net)
    return record


def save_policy(
    path: Path, policy: PolicyModel, config: Optional[Dict[str, Any]] = None
) -> Path:
    return write_record(path, policy_record(policy, config))


def load_policy(path: Path) -> PolicyModel:
    """Rebuild a policy from its checkpoint."""
    record = read_record(path, KIND, CHECKPOINT_FORMAT_VERSION)
    try:
        spec = make_env(**record["env"])
        fallbacks = int(record.get("training_fallbacks", 0))
        backend = record["backend"]
        if backend == TabularPolicy.backend:
            shape = (spec.num_states, spec.goal_count)
            if record.get("time_steps") is not None:
                shape = (int(record["time_steps"]), *shape)
            probs = np.zeros((*shape, spec.num_actions))
            support = np.zeros(shape, dtype=bool)
            for *key, row in record["entries"]:
                probs[tuple(key)] = row
                support[tuple(key)] = True
            return TabularPolicy(spec, probs, support, fallbacks)
        if backend == MlpPolicy.backend:
            return MlpPolicy(
                spec, mlp_from_record(record["network"]), record["features"], fallbacks
            )
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise DatasetFormatError(f"malformed policy checkpoint: {e}", line=1) from e
    raise DatasetFormatError(f"unknown policy backend '{backend}'", line=1)
