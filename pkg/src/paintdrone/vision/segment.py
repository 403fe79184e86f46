"""Column segmentation, ternarization and repaint decisions."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .hopfield import HopfieldNet, RecallResult, recall

WHITE_LEVEL = 0.5
BLACK_LEVEL = -0.5
MAJORITY = 0.7
# Gaps narrower than this between boundary columns are part of the boundary:
# a step edge gives twin response lobes with a zero crossing between them.
MIN_GAP = 5
COLOR_NAMES = {1: "white", -1: "black"}


class NoSidewalkError(ValueError):
    def __init__(self, message: str = "no sidewalk detected"):
        super().__init__(message)


@dataclass(frozen=True)
class Segment:
    start: int  # first column, inclusive
    end: int  # last column, exclusive
    value: int
    white: float
    black: float

    @property
    def width(self) -> int:
        return self.end - self.start


def ternarize(white: float, black: float, tau: float = MAJORITY) -> int:
    """+1 if the white fraction reaches tau, -1 if the black one does, else 0."""
    for name, v in (("white", white), ("black", black)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} fraction must be in [0, 1], got {v}")
    if white >= tau:
        return 1
    if black >= tau:
        return -1
    return 0


def column_profile(filtered: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(filtered, dtype=float)).mean(axis=0)


def segment_columns(filtered: np.ndarray, original: np.ndarray, threshold: float,
                    tau: float = MAJORITY, white_level: float = WHITE_LEVEL,
                    black_level: float = BLACK_LEVEL, min_gap: int = MIN_GAP) -> list[Segment]:
    """Split the image into column runs separated by strong filter responses.

    Each run of boundary columns is cut at its midpoint and the halves join
    the neighbouring segments, so the segments tile the full width.
    """
    filtered = np.asarray(filtered, dtype=float)
    original = np.asarray(original, dtype=float)
    if filtered.shape != original.shape:
        raise ValueError(f"image shapes differ: {filtered.shape} vs {original.shape}")
    width = original.shape[1]
    boundary = column_profile(filtered) > threshold
    marked = np.flatnonzero(boundary)
    for a, b in zip(marked, marked[1:]):
        if 1 < b - a <= min_gap:
            boundary[a:b] = True
    # Boundary runs as [a, b) column intervals.
    runs = []
    c = 0
    while c < width:
        if boundary[c]:
            a = c
            while c < width and boundary[c]:
                c += 1
            runs.append((a, c))
        else:
            c += 1
    # Runs touching the image border hold no block boundary.
    cuts = [(a + b) // 2 for a, b in runs if a > 0 and b < width]
    edges = [0] + cuts + [width]
    if len(runs) == 1 and runs[0] == (0, width):
        raise NoSidewalkError()
    white_px = original > white_level
    black_px = original < black_level
    segments = []
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        w = float(white_px[:, a:b].mean())
        k = float(black_px[:, a:b].mean())
        segments.append(Segment(a, b, ternarize(w, k, tau), w, k))
    if not segments:
        raise NoSidewalkError()
    return segments


@dataclass(frozen=True)
class RepaintDecision:
    """Recall of one window of three consecutive blocks (1-based block indices)."""

    triple_index: int
    blocks: tuple[int, int, int]
    input: tuple[int, ...]
    result: RecallResult

    @property
    def flagged(self) -> bool:
        return not self.result.recognised

    @property
    def repaints(self) -> list[tuple[int, str]]:
        if self.flagged or self.result.sweeps <= 1:
            return []
        return [(b, COLOR_NAMES[m]) for b, v, m in zip(self.blocks, self.input, self.result.final)
                if v != m]


@dataclass(frozen=True)
class BlockAction:
    block_index: int
    action: str  # keep | repaint | review
    color: str  # target colour for repaint, observed colour for keep, "" if unknown


def decide_repaints(values, net: HopfieldNet) -> list[RepaintDecision]:
    vals = [int(v) for v in values]
    if len(vals) < 3:
        raise ValueError(f"need at least 3 segments, got {len(vals)}")
    out = []
    for i in range(len(vals) - 2):
        triple = tuple(vals[i:i + 3])
        out.append(RepaintDecision(i + 1, (i + 1, i + 2, i + 3), triple, recall(net, triple)))
    return out


def merge_decisions(values, decisions: list[RepaintDecision]) -> list[BlockAction]:
    """Per block, majority over the windows covering it; ties go to repainting.

    A window votes "keep" for blocks it leaves alone and a colour for blocks it
    repaints. Flagged windows do not vote. A block with no votes, or a repaint
    whose colour votes tie, is sent for review.
    """
    vals = [int(v) for v in values]
    votes: list[Counter] = [Counter() for _ in vals]
    for d in decisions:
        if d.flagged:
            continue
        painted = dict(d.repaints)
        for b in d.blocks:
            votes[b - 1][painted.get(b, "keep")] += 1
    actions = []
    for idx, (v, c) in enumerate(zip(vals, votes), start=1):
        keep = c.pop("keep", 0)
        paint = sum(c.values())
        if keep == 0 and paint == 0:
            actions.append(BlockAction(idx, "review", ""))
        elif paint >= keep:
            ranked = c.most_common()
            if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
                actions.append(BlockAction(idx, "review", ""))
            else:
                actions.append(BlockAction(idx, "repaint", ranked[0][0]))
        else:
            actions.append(BlockAction(idx, "keep", COLOR_NAMES.get(v, "")))
    return actions
