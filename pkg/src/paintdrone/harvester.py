"""Electromagnetic harvester: induced voltage, coil resistance, power density.

The voltage law is evaluated as written for this device, V = N * w * A * B * mu,
with mu entering multiplicatively next to an already external flux density B.
A textbook Faraday form would not carry mu; the product is kept on purpose so
the 481.8 mV figure is reproduced by the same expression.

The coil cross-section A, the core diameter and the harvester volume are not
published. They are solved from the reported outputs (481.8 mV and
0.34 mW/cm^3) and the two solutions are checked against each other in
``consistency_report``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import yaml

TARGET_VOLTAGE = 0.4818  # V
TARGET_POWER_DENSITY = 340.0  # W/m^3, i.e. 0.34 mW/cm^3
DEFAULT_B = 5e-6  # T
DEFAULT_W = 2.0 * math.pi * 50.0  # rad/s

DEFAULT_N = 40_000
DEFAULT_MU = 2300.0
DEFAULT_WIRE_DIAMETER = 0.14e-3
DEFAULT_WIRE_RESISTIVITY = 1.11  # ohm per metre of wire
DEFAULT_SHEATH_LENGTH = 0.40
DEFAULT_AIR_GAP = 0.05e-3
# Mn-Zn core conductivity in S/m. Enters no equation; kept as metadata.
CORE_CONDUCTIVITY = 0.154


class HarvesterConfigError(ValueError):
    pass


def calibrated_area(voltage: float = TARGET_VOLTAGE, n: float = DEFAULT_N, w: float = DEFAULT_W,
                    b: float = DEFAULT_B, mu: float = DEFAULT_MU) -> float:
    """A = V / (N w B mu)."""
    return voltage / (n * w * b * mu)


def core_diameter_for_area(area: float) -> float:
    """Diameter of a round core with cross-section ``area``."""
    return math.sqrt(4.0 * area / math.pi)


DEFAULT_A = calibrated_area()
DEFAULT_CORE_DIAMETER = core_diameter_for_area(DEFAULT_A)


@dataclass(frozen=True)
class HarvesterSpec:
    N: float = DEFAULT_N
    A: float = DEFAULT_A
    mu: float = DEFAULT_MU
    wire_diameter: float = DEFAULT_WIRE_DIAMETER
    wire_resistivity: float = DEFAULT_WIRE_RESISTIVITY
    sheath_length: float = DEFAULT_SHEATH_LENGTH
    core_diameter: float = DEFAULT_CORE_DIAMETER
    air_gap: float = DEFAULT_AIR_GAP

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise HarvesterConfigError(f"{f.name} must be a finite number, got {v!r}")
            # N = 0 is allowed so sweeps can start at the origin.
            if v < 0 or (v == 0 and f.name != "N"):
                raise HarvesterConfigError(f"{f.name} must be > 0, got {v}")


@dataclass(frozen=True)
class FieldEnvironment:
    B: float = DEFAULT_B
    w: float = DEFAULT_W

    def __post_init__(self) -> None:
        if not (math.isfinite(self.B) and self.B >= 0):
            raise HarvesterConfigError(f"B must be finite and >= 0, got {self.B}")
        if not (math.isfinite(self.w) and self.w >= 0):
            raise HarvesterConfigError(f"w must be finite and >= 0, got {self.w}")


def induced_voltage(spec: HarvesterSpec, env: FieldEnvironment) -> float:
    return spec.N * env.w * spec.A * env.B * spec.mu


def coil_resistance(spec: HarvesterSpec) -> float:
    """Single-layer winding: each turn is one circumference at the wire centre line."""
    return spec.wire_resistivity * spec.N * math.pi * (spec.core_diameter + spec.wire_diameter)


def power_density(voltage: float, resistance: float, volume: float) -> float:
    """Matched-load power V^2 / (4R) per unit volume, in W/m^3."""
    if not resistance > 0:
        raise ValueError(f"resistance must be > 0, got {resistance}")
    if not volume > 0:
        raise ValueError(f"harvester volume must be > 0, got {volume}")
    return voltage * voltage / (4.0 * resistance) / volume


def calibrated_volume(voltage: float, resistance: float,
                      density: float = TARGET_POWER_DENSITY) -> float:
    """Volume at which ``power_density`` returns ``density``."""
    if not (resistance > 0 and density > 0):
        raise ValueError("resistance and density must be > 0")
    return voltage * voltage / (4.0 * resistance * density)


def coil_volume(spec: HarvesterSpec) -> float:
    """Envelope of the wound core: a cylinder one wire layer wider than the core."""
    outer = spec.core_diameter + 2.0 * spec.wire_diameter
    return math.pi * outer * outer / 4.0 * spec.sheath_length


def sweep_turns(spec: HarvesterSpec, env: FieldEnvironment,
                turns: Iterable[float]) -> list[tuple[float, float]]:
    turns = list(turns)
    if not turns:
        raise ValueError("turn range is empty")
    return [(n, induced_voltage(replace(spec, N=n), env)) for n in turns]


def parse_range(text: str) -> list[int]:
    """'N0:N1:step' inclusive of N1 when it lands on the grid."""
    try:
        start, stop, step = (int(p) for p in text.split(":"))
    except ValueError:
        raise HarvesterConfigError(f"sweep range must be N0:N1:step with integers, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise HarvesterConfigError(f"invalid sweep range {text!r}")
    return list(range(start, stop + 1, step))


def fit_through_origin(points: Sequence[tuple[float, float]]) -> dict[str, float]:
    """Least-squares line y = a + b x; returns slope, intercept, r2 and the
    worst relative residual of the zero-intercept fit y = s x."""
    x = [p[0] for p in points]
    y = [p[1] for p in points]
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((xi - mx) ** 2 for xi in x)
    sxy = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    syy = sum((yi - my) ** 2 for yi in y)
    slope = sxy / sxx if sxx else 0.0
    intercept = my - slope * mx
    sse = sum((yi - intercept - slope * xi) ** 2 for xi, yi in zip(x, y))
    r2 = 1.0 - sse / syy if syy else 1.0
    s0 = sum(xi * yi for xi, yi in zip(x, y)) / sum(xi * xi for xi in x)
    scale = max(abs(v) for v in y) or 1.0
    worst = max(abs(yi - s0 * xi) for xi, yi in zip(x, y)) / scale
    return {"slope": slope, "intercept": intercept, "r2": r2,
            "origin_slope": s0, "origin_residual": worst}


def write_sweep(points: Sequence[tuple[float, float]], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "V"])
        for n, v in points:
            w.writerow([int(n) if float(n).is_integer() else n, repr(float(v))])
    return path


@dataclass(frozen=True)
class ConsistencyReport:
    voltage: float
    resistance: float
    calibrated_volume: float
    coil_volume: float
    coil_density: float
    winding_length_needed: float
    sheath_length: float

    @property
    def volume_ratio(self) -> float:
        return self.coil_volume / self.calibrated_volume

    @property
    def consistent(self) -> bool:
        return (abs(self.volume_ratio - 1.0) <= 0.05
                and self.winding_length_needed <= self.sheath_length)

    def lines(self) -> list[str]:
        flag = "OK" if self.consistent else "INCONSISTENT"
        return [
            f"voltage: {self.voltage * 1e3:.2f} mV",
            f"coil resistance: {self.resistance:.2f} ohm",
            f"volume for {TARGET_POWER_DENSITY * 1e-3:.2f} mW/cm^3: "
            f"{self.calibrated_volume * 1e6:.4f} cm^3",
            f"wound-core volume: {self.coil_volume * 1e6:.4f} cm^3 "
            f"(gives {self.coil_density * 1e-3:.4f} mW/cm^3, ratio {self.volume_ratio:.3f})",
            f"single-layer winding length: {self.winding_length_needed:.3f} m "
            f"vs sheath {self.sheath_length:.3f} m",
            f"geometry: {flag}",
        ]


def consistency_report(spec: HarvesterSpec, env: FieldEnvironment,
                       density: float = TARGET_POWER_DENSITY) -> ConsistencyReport:
    """Check whether one (A, core diameter, volume) triple can give both targets."""
    v = induced_voltage(spec, env)
    r = coil_resistance(spec)
    cv = coil_volume(spec)
    return ConsistencyReport(
        voltage=v,
        resistance=r,
        calibrated_volume=calibrated_volume(v, r, density),
        coil_volume=cv,
        coil_density=power_density(v, r, cv),
        winding_length_needed=spec.N * spec.wire_diameter,
        sheath_length=spec.sheath_length,
    )


def load_harvester(source: str | Path | Mapping[str, Any] | None) -> tuple[HarvesterSpec, FieldEnvironment]:
    """Read ``spec`` and ``environment`` blocks (SI units) from YAML."""
    if source is None:
        return HarvesterSpec(), FieldEnvironment()
    if isinstance(source, Mapping):
        data = source
    else:
        try:
            data = yaml.safe_load(Path(source).read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise HarvesterConfigError(f"{source}: {exc}") from None
    if not isinstance(data, Mapping):
        raise HarvesterConfigError("harvester file must contain a mapping")
    unknown = sorted(set(data) - {"spec", "environment"})
    if unknown:
        raise HarvesterConfigError(f"unknown keys {unknown}; expected 'spec' and 'environment'")
    out = []
    for key, cls in (("spec", HarvesterSpec), ("environment", FieldEnvironment)):
        block = data.get(key) or {}
        if not isinstance(block, Mapping):
            raise HarvesterConfigError(f"{key}: expected a mapping")
        known = {f.name for f in fields(cls)}
        bad = sorted(set(block) - known)
        if bad:
            raise HarvesterConfigError(f"{key}: unknown keys {bad}")
        try:
            out.append(cls(**{k: float(v) for k, v in block.items()}))
        except (TypeError, ValueError) as exc:
            raise HarvesterConfigError(f"{key}: {exc}") from None
    return out[0], out[1]


def default_harvester_path() -> Path:
    return Path(__file__).resolve().parent / "data" / "harvester.yaml"
