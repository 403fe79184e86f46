"""Image to repaint orders, and scoring against generator ground truth."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FILTERS
from .hopfield import HopfieldNet, default_net
from .segment import (MAJORITY, BlockAction, RepaintDecision, Segment, decide_repaints,
                      merge_decisions, segment_columns)
from .synth import SyntheticImage
from .pgm import to_gray

# Column-profile thresholds, in units of each filter's own output.
DEFAULT_THRESHOLDS = {"mexican-hat": 0.05, "gabor-pca": 0.15}


@dataclass(frozen=True)
class InspectionConfig:
    filter: str = "mexican-hat"
    scale: float = 2.0
    threshold: float | None = None
    tau: float = MAJORITY

    def __post_init__(self) -> None:
        if self.filter not in FILTERS:
            raise ValueError(f"unknown filter {self.filter!r}; expected one of {sorted(FILTERS)}")

    @property
    def boundary_threshold(self) -> float:
        return DEFAULT_THRESHOLDS[self.filter] if self.threshold is None else self.threshold


@dataclass(frozen=True)
class Inspection:
    segments: list[Segment]
    decisions: list[RepaintDecision]
    actions: list[BlockAction]

    @property
    def vector(self) -> list[int]:
        return [s.value for s in self.segments]


def filter_image(gray: np.ndarray, config: InspectionConfig) -> np.ndarray:
    if config.filter == "mexican-hat":
        return FILTERS["mexican-hat"](gray, config.scale)
    return FILTERS[config.filter](gray)


def inspect_image(pixels: np.ndarray, config: InspectionConfig | None = None,
                  net: HopfieldNet | None = None) -> Inspection:
    config = config or InspectionConfig()
    net = net or default_net()
    gray = to_gray(pixels)
    filtered = filter_image(gray, config)
    segments = segment_columns(filtered, gray, config.boundary_threshold, config.tau)
    values = [s.value for s in segments]
    if len(values) < 3:
        return Inspection(segments, [], [BlockAction(i, "review", "") for i in range(1, len(values) + 1)])
    decisions = decide_repaints(values, net)
    return Inspection(segments, decisions, merge_decisions(values, decisions))


def decision_rows(name: str, inspection: Inspection) -> list[tuple[str, int, str, str]]:
    return [(name, a.block_index, a.action, a.color) for a in inspection.actions]


@dataclass(frozen=True)
class Score:
    true_pos: int
    false_pos: int
    false_neg: int
    segment_count_errors: int
    images: int

    @property
    def precision(self) -> float:
        found = self.true_pos + self.false_pos
        return self.true_pos / found if found else 1.0

    @property
    def recall(self) -> float:
        wanted = self.true_pos + self.false_neg
        return self.true_pos / wanted if wanted else 1.0


def score_rows(predicted, truth) -> tuple[int, int, int]:
    """Count repaint orders; an order is correct only if block and colour both match."""
    want = {(r[0], r[1], r[3]) for r in truth if r[2] == "repaint"}
    got = {(r[0], r[1], r[3]) for r in predicted if r[2] == "repaint"}
    return len(got & want), len(got - want), len(want - got)


def evaluate_corpus(images: list[SyntheticImage], config: InspectionConfig | None = None
                    ) -> tuple[Score, list[tuple[str, int, str, str]]]:
    config = config or InspectionConfig()
    net = default_net()
    predicted = []
    truth = []
    miscounted = 0
    for im in images:
        insp = inspect_image(im.pixels, config, net)
        if len(insp.segments) != len(im.widths):
            miscounted += 1
        predicted.extend(decision_rows(im.name, insp))
        truth.extend(im.ground_truth())
    tp, fp, fn = score_rows(predicted, truth)
    return Score(tp, fp, fn, miscounted, len(images)), predicted
