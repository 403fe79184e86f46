"""Mamdani inference: min for AND, max aggregation, centroid defuzzification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .defuzz import centroid_moments
from .membership import Label, MembershipSet, load_membership
from .rules import ROTORS, RuleTable, default_rules_path, load_rule_table

INPUT_LIMIT_DEG = 30.0
OUTPUT_LIMIT_RPM = 1050.0


class InferenceError(RuntimeError):
    pass


def clamp(x: float, limit: float) -> float:
    return max(-limit, min(limit, x))


@dataclass(frozen=True)
class ErrorInput:
    """Pitch and roll errors in degrees, saturated to the +/-30 deg universe."""

    delta_theta: float
    delta_phi: float

    def __post_init__(self) -> None:
        for name in ("delta_theta", "delta_phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, clamp(v, INPUT_LIMIT_DEG))


def rpm_to_rad_per_sec(rpm):
    return rpm * (2.0 * math.pi / 60.0)


def default_membership_path() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "membership.yaml"


class FuzzyController:
    """Maps (dtheta, dphi) in degrees to eight rotor-speed changes in rpm.

    Output order follows ``ROTORS``: 1R, 1L, 2R, 2L, 3R, 3L, 4R, 4L.
    """

    name = "fuzzy"

    def __init__(self, table: RuleTable, inputs: MembershipSet, outputs: MembershipSet):
        self.table = table
        self.inputs = inputs
        self.outputs = outputs

    @classmethod
    def default(cls) -> "FuzzyController":
        return cls.from_files(default_rules_path(), default_membership_path())

    @classmethod
    def from_files(cls, rules: str | Path, membership: str | Path) -> "FuzzyController":
        inputs, outputs = load_membership(membership)
        return cls(load_rule_table(rules), inputs, outputs)

    def firing(self, e: ErrorInput) -> list[dict[Label, float]]:
        """Per output channel, the strongest rule strength for each consequent label."""
        g_theta = self.inputs.fuzzify(e.delta_theta)
        g_phi = self.inputs.fuzzify(e.delta_phi)
        strengths: list[dict[Label, float]] = [{} for _ in ROTORS]
        fired = False
        for row in self.table:
            w = min(g_theta[row.in_theta], g_phi[row.in_phi])
            if w <= 0.0:
                continue
            fired = True
            for ch, label in enumerate(row.out):
                if w > strengths[ch].get(label, 0.0):
                    strengths[ch][label] = w
        if not fired:
            raise InferenceError(
                f"no rule fired for dtheta={e.delta_theta}, dphi={e.delta_phi}; "
                "membership functions do not cover the input universe")
        return strengths

    def infer(self, e: ErrorInput) -> np.ndarray:
        out = np.empty(len(ROTORS))
        for ch, by_label in enumerate(self.firing(e)):
            clipped = [(self.outputs[label], w) for label, w in sorted(by_label.items())]
            area, moment = centroid_moments(clipped, self.outputs.universe)
            if area <= 0.0:
                raise InferenceError(f"channel {ROTORS[ch]} aggregated to an empty set")
            out[ch] = moment / area
        return np.clip(out, -OUTPUT_LIMIT_RPM, OUTPUT_LIMIT_RPM)

    def __call__(self, delta_theta: float, delta_phi: float) -> np.ndarray:
        return self.infer(ErrorInput(delta_theta, delta_phi))


def infer(e: ErrorInput, table: RuleTable, inputs: MembershipSet, outputs: MembershipSet) -> np.ndarray:
    return FuzzyController(table, inputs, outputs).infer(e)
