"""Experiment configuration: TOML files plus ``key=value`` overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .errors import ConfigError
from .lie import available_groups
from .reps import STRATEGIES
from .suite import ALL_TOLERANCES


@dataclass
class ExperimentConfig:
    group_id: str = "su2"
    genus: int = 2
    central_target: list = field(default_factory=list)
    central_twist: int | None = None
    rep_strategy: str = "trivial"
    rep_file: str | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    sample_count: int = 50
    trials: int = 100
    # scale of a random change of the base metric on C^1 (0 keeps the block-diagonal gram)
    metric_perturbation: float = 0.0
    output_path: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.group_id not in available_groups():
            raise ConfigError(f"unknown group_id {self.group_id!r}; available: {available_groups()}")
        if not isinstance(self.genus, int) or self.genus < 1:
            raise ConfigError("genus must be an integer >= 1")
        if self.rep_strategy not in STRATEGIES:
            raise ConfigError(f"rep_strategy must be one of {STRATEGIES}")
        if self.rep_strategy == "from-file" and not self.rep_file:
            raise ConfigError("rep_strategy 'from-file' needs rep_file")
        if self.sample_count < 0 or self.trials < 1:
            raise ConfigError("sample_count must be >= 0 and trials >= 1")
        if not isinstance(self.metric_perturbation, (int, float)) or self.metric_perturbation < 0:
            raise ConfigError("metric_perturbation must be a non-negative number")
        self.metric_perturbation = float(self.metric_perturbation)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for k, v in self.tolerances.items():
            if k not in ALL_TOLERANCES:
                raise ConfigError(f"unknown tolerance {k!r}")
            if not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError(f"tolerance {k!r} must be positive")
        self.central_target = [float(x) for x in self.central_target]
        return self

    def tolerance_table(self) -> dict:
        table = {k: v[0] for k, v in ALL_TOLERANCES.items()}
        table.update({k: float(v) for k, v in self.tolerances.items()})
        return table

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["tolerances"] = self.tolerance_table()
        return d


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(text: str):
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``key=value`` strings; values are read as TOML literals, else kept as strings."""
    data = dict(data)
    data["tolerances"] = dict(data.get("tolerances", {}))
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = (s.strip() for s in item.split("=", 1))
        value = _parse_value(text)
        if key.startswith("tolerances."):
            data["tolerances"][key.split(".", 1)[1]] = value
        else:
            data[key] = value
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**data).validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None = None, overrides=(), seed: int | None = None) -> ExperimentConfig:
    data = {}
    if path is not None:
        try:
            data = tomli.loads(Path(path).read_text())
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    data = apply_overrides(data, overrides)
    if seed is not None:
        data["seed"] = seed
    return config_from_dict(data)
