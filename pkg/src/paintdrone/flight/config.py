"""Scenario files (YAML) and trace CSV output."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .craft import CraftParams
from .scenario import TRACE_COLUMNS, Disturbance, DisturbanceProfile, PIDGains, ScenarioResult

CONTROLLERS = ("fuzzy", "pid")


class ScenarioConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    params: CraftParams = field(default_factory=CraftParams)
    controller: str = "fuzzy"
    gains: PIDGains = field(default_factory=PIDGains)
    disturbance: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    horizon: float = 10.0
    seed: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "controller": self.controller,
            "horizon": self.horizon,
            "seed": self.seed,
            "craft": {f.name: getattr(self.params, f.name) for f in fields(CraftParams)},
            "pid": {f.name: getattr(self.gains, f.name) for f in fields(PIDGains)},
            "disturbances": [
                {f.name: getattr(ev, f.name) for f in fields(Disturbance)}
                for ev in self.disturbance.events
            ],
        }


def _build(cls, data: Any, where: str):
    if data is None:
        return cls()
    if not isinstance(data, Mapping):
        raise ScenarioConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ScenarioConfigError(f"{where}: unknown keys {unknown}; expected some of {sorted(known)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ScenarioConfigError(f"{where}: {exc}") from None


def scenario_from_dict(data: Mapping[str, Any]) -> Scenario:
    if not isinstance(data, Mapping):
        raise ScenarioConfigError("scenario file must contain a mapping")
    allowed = {"controller", "horizon", "seed", "craft", "pid", "disturbances"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ScenarioConfigError(f"unknown scenario keys {unknown}")
    controller = data.get("controller", "fuzzy")
    if controller not in CONTROLLERS:
        raise ScenarioConfigError(f"controller must be one of {CONTROLLERS}, got {controller!r}")
    events = data.get("disturbances") or []
    if not isinstance(events, list):
        raise ScenarioConfigError("disturbances: expected a list")
    try:
        horizon = float(data.get("horizon", 10.0))
        seed = int(data.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ScenarioConfigError(f"horizon/seed: {exc}") from None
    if not horizon > 0:
        raise ScenarioConfigError("horizon must be > 0")
    try:
        profile = DisturbanceProfile(tuple(
            _build(Disturbance, ev, f"disturbances[{i}]") for i, ev in enumerate(events)))
    except ValueError as exc:
        raise ScenarioConfigError(str(exc)) from None
    return Scenario(
        params=_build(CraftParams, data.get("craft"), "craft"),
        controller=controller,
        gains=_build(PIDGains, data.get("pid"), "pid"),
        disturbance=profile,
        horizon=horizon,
        seed=seed,
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ScenarioConfigError(f"{path}: {exc}") from None
    return scenario_from_dict(data or {})


def default_scenario_path() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "table4.yaml"


def write_trace(result: ScenarioResult, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for row in result.trace.tolist():
            w.writerow([repr(float(v)) for v in row])
    return path


def read_trace(path: str | Path) -> dict[str, list[float]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {c: [float(r[c]) for r in rows] for c in TRACE_COLUMNS}
