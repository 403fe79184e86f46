"""Linguistic labels, piecewise-linear membership functions and their config files."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

import yaml


class Label(enum.IntEnum):
    """The seven fuzzy sets, totally ordered from NL to PL."""

    NL = -3
    NM = -2
    NS = -1
    Z = 0
    PS = 1
    PM = 2
    PL = 3

    def negate(self) -> "Label":
        return Label(-self.value)

    @classmethod
    def parse(cls, token: str) -> "Label":
        try:
            return cls[token]
        except KeyError:
            raise ValueError(f"unknown fuzzy label {token!r}") from None


class MembershipConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipFunction:
    """Triangle (or shoulder) over the real line.

    ``shoulder="left"`` holds grade 1 for every x <= peak, ``"right"`` for every
    x >= peak. Otherwise the grade is 0 outside [foot_left, foot_right], 1 at
    the peak and linear in between.
    """

    label: Label
    foot_left: float
    peak: float
    foot_right: float
    shoulder: str | None = None

    def __post_init__(self) -> None:
        if not (self.foot_left <= self.peak <= self.foot_right):
            raise MembershipConfigError(
                f"{self.label.name}: need foot_left <= peak <= foot_right, got "
                f"({self.foot_left}, {self.peak}, {self.foot_right})"
            )
        if self.shoulder not in (None, "left", "right"):
            raise MembershipConfigError(f"{self.label.name}: bad shoulder {self.shoulder!r}")

    def grade(self, x: float) -> float:
        a, b, c = self.foot_left, self.peak, self.foot_right
        if self.shoulder == "left" and x <= b:
            return 1.0
        if self.shoulder == "right" and x >= b:
            return 1.0
        if x < a or x > c:
            return 0.0
        if x == b:
            return 1.0
        if x < b:
            return (x - a) / (b - a)
        return (c - x) / (c - b)

    def limit(self, x: float, side: int) -> float:
        """One-sided limit of the grade at x: from the right if side > 0, else from the left.

        Differs from ``grade`` only where an edge is vertical (foot == peak).
        """
        a, b, c = self.foot_left, self.peak, self.foot_right
        right = side > 0
        if self.shoulder == "left" and (x < b if right else x <= b):
            return 1.0
        if self.shoulder == "right" and (x >= b if right else x > b):
            return 1.0
        if (x < a or x >= c) if right else (x <= a or x > c):
            return 0.0
        if x < b if right else x <= b:
            return (x - a) / (b - a)
        return (c - x) / (c - b)

    def support(self) -> tuple[float, float]:
        lo = -math.inf if self.shoulder == "left" else self.foot_left
        hi = math.inf if self.shoulder == "right" else self.foot_right
        return lo, hi

    def edges(self) -> list[tuple[float, float]]:
        """Sloped edges as (x0, slope) with grade = slope * (x - x0)."""
        out = []
        if self.shoulder != "left" and self.peak > self.foot_left:
            out.append((self.foot_left, 1.0 / (self.peak - self.foot_left)))
        if self.shoulder != "right" and self.foot_right > self.peak:
            out.append((self.foot_right, -1.0 / (self.foot_right - self.peak)))
        return out

    def vertices(self) -> list[float]:
        pts = [self.peak]
        if self.shoulder != "left":
            pts.append(self.foot_left)
        if self.shoulder != "right":
            pts.append(self.foot_right)
        return pts

    def mirrored(self) -> "MembershipFunction":
        """Reflection x -> -x, keeping the label."""
        flip = {"left": "right", "right": "left", None: None}[self.shoulder]
        return MembershipFunction(self.label, -self.foot_right, -self.peak, -self.foot_left, flip)

    def scaled(self, factor: float) -> "MembershipFunction":
        return MembershipFunction(
            self.label, self.foot_left * factor, self.peak * factor,
            self.foot_right * factor, self.shoulder,
        )


@dataclass(frozen=True)
class MembershipSet:
    """Seven membership functions over a closed universe."""

    universe: tuple[float, float]
    functions: Mapping[Label, MembershipFunction]

    def __post_init__(self) -> None:
        lo, hi = self.universe
        if not lo < hi:
            raise MembershipConfigError(f"empty universe {self.universe}")
        missing = set(Label) - set(self.functions)
        if missing:
            names = ", ".join(l.name for l in sorted(missing))
            raise MembershipConfigError(f"missing membership functions for {names}")
        for label, mf in self.functions.items():
            if mf.label is not label:
                raise MembershipConfigError(f"function keyed {label.name} is labelled {mf.label.name}")
        gap = _first_uncovered(self.functions.values(), lo, hi)
        if gap is not None:
            raise MembershipConfigError(f"universe point {gap:g} has zero membership in every set")

    def __getitem__(self, label: Label) -> MembershipFunction:
        return self.functions[label]

    def fuzzify(self, x: float) -> dict[Label, float]:
        return {label: self.functions[label].grade(x) for label in Label}

    def mirrored(self) -> "MembershipSet":
        lo, hi = self.universe
        return MembershipSet((-hi, -lo), {l: f.mirrored() for l, f in self.functions.items()})

    def is_symmetric(self) -> bool:
        """True when reflecting every set gives the set of the negated label."""
        lo, hi = self.universe
        if lo != -hi:
            return False
        return all(self.functions[l.negate()] == replace(f.mirrored(), label=l.negate())
                   for l, f in self.functions.items())

    def scaled(self, factor: float) -> "MembershipSet":
        lo, hi = self.universe
        return MembershipSet((lo * factor, hi * factor),
                             {l: f.scaled(factor) for l, f in self.functions.items()})


def _first_uncovered(functions: Iterable[MembershipFunction], lo: float, hi: float) -> float | None:
    """Return a point of [lo, hi] where every grade is zero, or None."""
    functions = list(functions)
    candidates = {lo, hi}
    for mf in functions:
        for x in mf.support():
            if lo <= x <= hi:
                candidates.add(x)
    pts = sorted(candidates)
    probes = list(pts)
    probes += [(u + v) / 2 for u, v in zip(pts, pts[1:])]
    for x in probes:
        if all(mf.grade(x) <= 0.0 for mf in functions):
            return x
    return None


def _set_from_block(block: Mapping, where: str) -> MembershipSet:
    try:
        lo, hi = (float(v) for v in block["universe"])
        entries = block["sets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MembershipConfigError(f"{where}: need 'universe: [lo, hi]' and 'sets'") from exc
    functions: dict[Label, MembershipFunction] = {}
    for i, entry in enumerate(entries):
        try:
            label = Label.parse(str(entry["label"]))
            mf = MembershipFunction(
                label, float(entry["foot_left"]), float(entry["peak"]),
                float(entry["foot_right"]), entry.get("shoulder"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MembershipConfigError(f"{where}: set #{i + 1}: {exc}") from exc
        if label in functions:
            raise MembershipConfigError(f"{where}: label {label.name} defined twice")
        functions[label] = mf
    return MembershipSet((lo, hi), functions)


def load_membership(source: str | Path | Mapping) -> tuple[MembershipSet, MembershipSet]:
    """Read the ``inputs`` and ``outputs`` blocks of a membership YAML file."""
    if isinstance(source, Mapping):
        doc = source
    else:
        doc = yaml.safe_load(Path(source).read_text(encoding="utf-8"))
    if not isinstance(doc, Mapping) or "inputs" not in doc or "outputs" not in doc:
        raise MembershipConfigError("membership config needs 'inputs' and 'outputs' blocks")
    return _set_from_block(doc["inputs"], "inputs"), _set_from_block(doc["outputs"], "outputs")


def dump_membership(inputs: MembershipSet, outputs: MembershipSet) -> str:
    def block(ms: MembershipSet) -> dict:
        sets = []
        for label in Label:
            f = ms[label]
            entry = {"label": label.name, "foot_left": f.foot_left, "peak": f.peak,
                     "foot_right": f.foot_right}
            if f.shoulder:
                entry["shoulder"] = f.shoulder
            sets.append(entry)
        return {"universe": list(ms.universe), "sets": sets}

    return yaml.safe_dump({"inputs": block(inputs), "outputs": block(outputs)}, sort_keys=False)


def midpoint_geometry() -> tuple[MembershipSet, MembershipSet]:
    """Uncalibrated sets: peaks at crisp-range midpoints, Z with feet +/-5,
    outputs the same shapes scaled by 35 onto +/-1050 rpm."""
    shapes = [
        (Label.NL, -30, -25, -20, "left"),
        (Label.NM, -25, -15, -5, None),
        (Label.NS, -10, -5, 0, None),
        (Label.Z, -5, 0, 5, None),
        (Label.PS, 0, 5, 10, None),
        (Label.PM, 5, 15, 25, None),
        (Label.PL, 20, 25, 30, "right"),
    ]
    inputs = MembershipSet((-30.0, 30.0), {
        l: MembershipFunction(l, float(a), float(b), float(c), sh) for l, a, b, c, sh in shapes})
    return inputs, inputs.scaled(35.0)
