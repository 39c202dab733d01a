"""
Run configuration files.

A run is described by a TOML file with the sections [env], [data],
[algorithm], [binning], [train], [eval] and [output]. Every field has a
default except the environment id; command-line flags override file values.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dwsl.config import EVAL_EPISODES, EVAL_EVERY, EVAL_STRATEGY, RUNS_DIR
from dwsl.services.evaluation import GOAL_STRATEGIES
from dwsl.services.mdp import GOAL_MAPS, is_registered, registered_envs
from dwsl.services.policy import ACT_MODES, ALGORITHMS, POLICY_BACKENDS, TrainConfig


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class EnvSection(_Section):
    id: str
    horizon: Optional[int] = Field(None, ge=1)
    goal_map: str = "identity"

    @field_validator("id")
    @classmethod
    def _registered(cls, value):
        if not is_registered(value):
            raise ValueError(
                f"unknown environment '{value}'; registered: "
                f"{', '.join(registered_envs())}"
            )
        return value

    @field_validator("goal_map")
    @classmethod
    def _known_goal_map(cls, value):
        if value not in GOAL_MAPS:
            raise ValueError(f"goal_map must be one of {', '.join(GOAL_MAPS)}")
        return value


class DataSection(_Section):
    """Either an existing dataset file or the recipe to collect one."""

    path: Optional[Path] = None
    behavior: str = "mixture:0.9:0.2"
    traj: int = Field(500, ge=1)
    seed: int = 0

    @field_validator("path")
    @classmethod
    def _exists(cls, value):
        if value is not None and not Path(value).is_file():
            raise ValueError(f"dataset file '{value}' does not exist")
        return value


class AlgorithmSection(_Section):
    name: str = "dwsl"
    backend: str = "tabular"

    @field_validator("name")
    @classmethod
    def _known_algorithm(cls, value):
        if value not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {', '.join(ALGORITHMS)}")
        return value

    @field_validator("backend")
    @classmethod
    def _known_backend(cls, value):
        if value not in POLICY_BACKENDS:
            raise ValueError(f"backend must be one of {', '.join(POLICY_BACKENDS)}")
        return value


class BinningSection(_Section):
    n_step: int = Field(1, ge=1)
    achieved_as_one: bool = False


class EvalSection(_Section):
    every: int = Field(EVAL_EVERY, ge=1)
    episodes: int = Field(EVAL_EPISODES, ge=1)
    strategy: str = EVAL_STRATEGY
    seed: int = 0
    mode: str = "greedy"

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, value):
        if value not in GOAL_STRATEGIES:
            raise ValueError(f"strategy must be one of {', '.join(GOAL_STRATEGIES)}")
        return value

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value):
        if value not in ACT_MODES:
            raise ValueError(f"mode must be one of {', '.join(ACT_MODES)}")
        return value


class OutputSection(_Section):
    dir: Path = RUNS_DIR / "default"


class RunConfig(_Section):
    env: EnvSection
    data: DataSection = DataSection()
    algorithm: AlgorithmSection = AlgorithmSection()
    binning: BinningSection = BinningSection()
    train: TrainConfig = TrainConfig()
    eval: EvalSection = EvalSection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _bootstrap_single_step(self):
        if self.algorithm.name == "dwsl_b" and self.binning.n_step != 1:
            raise ValueError("dwsl_b requires binning.n_step = 1")
        return self

    def provenance(self) -> Dict[str, Any]:
        """The resolved configuration embedded in output files, without [output]."""
        return self.model_dump(mode="json", exclude={"output"})


def apply_overrides(
    data: Dict[str, Any], overrides: Mapping[str, Any]
) -> Dict[str, Any]:
    """
    Merge 'section.field' overrides into raw config data; None values are skipped.
    """
    merged = {section: dict(values) for section, values in data.items()}
    for key, value in overrides.items():
        if value is None:
            continue
        section, field = key.split(".", 1)
        merged.setdefault(section, {})[field] = value
    return merged


def load_run_config(
    path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """
    Load and validate a run configuration.

    Args:
        path: TOML file (optional when overrides name the environment)
        overrides: Flag values keyed by 'section.field'

    Returns:
        The validated RunConfig

    Raises:
        pydantic.ValidationError: If any value is out of range
        tomllib.TOMLDecodeError: If the file is not valid TOML
    """
    data: Dict[str, Any] = {}
    if path is not None:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    return RunConfig.model_validate(apply_overrides(data, overrides or {}))
