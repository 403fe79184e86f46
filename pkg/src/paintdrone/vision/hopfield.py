"""Three-neuron Hopfield memory for black/white block triples.

Weights follow W = sum_j v_j v_j^T - M I, with M the number of stored
memories. Recall runs synchronous sweeps s <- sign(W s); a neuron whose
field is exactly 0 keeps its previous value. A run stops on the first
sweep that changes nothing, and that confirming sweep is counted, so a
stored memory is recognised in one sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIZE = 3
SWEEP_CAP = 10
ALTERNATING = ((1, -1, 1), (-1, 1, -1))


@dataclass(frozen=True)
class HopfieldNet:
    weights: np.ndarray
    memories: tuple[tuple[int, ...], ...]

    def energy(self, state) -> float:
        s = np.asarray(state, dtype=float)
        return float(-0.5 * s @ self.weights @ s)


def _check_vector(v, allowed: set[int], what: str) -> tuple[int, ...]:
    vals = tuple(int(x) for x in v)
    if len(vals) != SIZE:
        raise ValueError(f"{what} must have length {SIZE}, got {len(vals)}")
    if any(x not in allowed for x in vals) or any(float(x) != float(y) for x, y in zip(vals, v)):
        raise ValueError(f"{what} {list(v)} has entries outside {sorted(allowed)}")
    return vals


def train_hopfield(memories) -> HopfieldNet:
    mems = tuple(_check_vector(m, {-1, 1}, "memory") for m in memories)
    if not 1 <= len(mems) <= 2:
        raise ValueError(f"expected 1 or 2 memories, got {len(mems)}")
    w = np.zeros((SIZE, SIZE), dtype=np.int64)
    for m in mems:
        v = np.array(m, dtype=np.int64)
        w += np.outer(v, v)
    w -= len(mems) * np.eye(SIZE, dtype=np.int64)
    return HopfieldNet(w, mems)


def default_net() -> HopfieldNet:
    return train_hopfield(ALTERNATING)


@dataclass(frozen=True)
class RecallResult:
    input: tuple[int, ...]
    final: tuple[int, ...]
    sweeps: int
    matched: int | None
    converged: bool
    states: tuple[tuple[int, ...], ...]

    @property
    def memory(self) -> tuple[int, ...] | None:
        return self.final if self.matched is not None else None

    @property
    def recognised(self) -> bool:
        return self.converged and self.matched is not None

    def describe(self) -> str:
        vec = ",".join(str(x) for x in self.final)
        noun = "sweep" if self.sweeps == 1 else "sweeps"
        if not self.converged:
            cycle = " -> ".join("[" + ",".join(map(str, s)) + "]" for s in self.states)
            return f"did not converge within {self.sweeps} sweeps; states {cycle}; flag for review"
        if self.matched is None:
            return f"unrecognizable: settled at [{vec}] after {self.sweeps} {noun}; flag for review"
        return f"memory matched in {self.sweeps} {noun}: [{vec}]"


def sweep(weights: np.ndarray, state: tuple[int, ...]) -> tuple[int, ...]:
    field = weights @ np.asarray(state, dtype=np.int64)
    return tuple(int(np.sign(h)) if h != 0 else s for h, s in zip(field.tolist(), state))


def recall(net: HopfieldNet, pattern, cap: int = SWEEP_CAP) -> RecallResult:
    state = _check_vector(pattern, {-1, 0, 1}, "input")
    start = state
    states = [state]
    for n in range(1, cap + 1):
        nxt = sweep(net.weights, state)
        if nxt == state:
            matched = net.memories.index(state) if state in net.memories else None
            return RecallResult(start, state, n, matched, True, tuple(states))
        state = nxt
        states.append(state)
    return RecallResult(start, state, cap, None, False, tuple(states))


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        vals = [int(p) for p in text.replace(" ", "").strip("[]").split(",")]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None
    return _check_vector(vals, {-1, 0, 1}, "input")
