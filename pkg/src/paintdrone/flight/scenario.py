"""Closed-loop attitude scenarios: disturbance schedules, PID baseline, settle time."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from ..fuzzy.engine import OUTPUT_LIMIT_RPM, ErrorInput, FuzzyController
from ..fuzzy.rules import ROTORS
from .craft import AttitudeState, CraftParams, RotorLayout, step

TRACE_COLUMNS = (
    ["t", "theta", "phi", "p", "q"]
    + [f"w{r}" for r in ROTORS]
    + [f"dW{r}" for r in ROTORS]
)

DISTURBANCE_KINDS = ("error_step", "torque")


@dataclass(frozen=True)
class Disturbance:
    """One scheduled event.

    ``error_step`` raises the attitude errors by (delta_theta, delta_phi)
    degrees: with ``duration == 0`` the attitude is knocked off instantly,
    otherwise the reference is held offset for ``duration`` seconds.
    ``torque`` adds (roll, pitch) N*m for ``duration`` seconds.
    """

    kind: str
    start: float
    duration: float = 0.0
    delta_theta: float = 0.0
    delta_phi: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.start < 0 or self.duration < 0:
            raise ValueError("disturbance start and duration must be >= 0")
        if self.kind == "torque" and self.duration == 0:
            raise ValueError("torque pulses need a positive duration")
        for v in (self.delta_theta, self.delta_phi):
            if abs(v) > 30.0:
                raise ValueError(f"error step {v} deg outside the +/-30 deg universe")

    @property
    def end(self) -> float:
        return self.start + self.duration

    def negated(self) -> "Disturbance":
        return Disturbance(self.kind, self.start, self.duration, -self.delta_theta,
                           -self.delta_phi, -self.roll, -self.pitch)


@dataclass(frozen=True)
class DisturbanceProfile:
    events: tuple[Disturbance, ...] = ()

    def __post_init__(self) -> None:
        starts = [e.start for e in self.events]
        if starts != sorted(starts):
            raise ValueError("disturbance schedule must be ordered by start time")

    @property
    def end(self) -> float:
        return max((e.end for e in self.events), default=0.0)

    def negated(self) -> "DisturbanceProfile":
        return DisturbanceProfile(tuple(e.negated() for e in self.events))

    @classmethod
    def table4(cls) -> "DisturbanceProfile":
        return cls((Disturbance("error_step", 0.0, delta_theta=-3.2, delta_phi=1.7),))


@dataclass(frozen=True)
class PIDGains:
    # Axis command in rpm per degree of error (and per deg*s, per deg/s).
    # Frozen baseline: monotone, no overshoot on the Table 4 step.
    kp: float = 11.0
    ki: float = 0.0
    kd: float = 2.0
    integral_limit: float = 20.0

    def __post_init__(self) -> None:
        vals = (self.kp, self.ki, self.kd, self.integral_limit)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("PID gains must be finite")


@dataclass
class PIDState:
    integral: list[float] = field(default_factory=lambda: [0.0, 0.0])
    previous: list[float] | None = None


def pid_control(e: ErrorInput, gains: PIDGains, state: PIDState, dt: float,
                layout: RotorLayout | None = None) -> np.ndarray:
    """Per-axis PID on (dtheta, dphi), mixed onto the rotors by the transposed moment arms.

    Updates ``state`` in place. A negative pitch error asks for a nose-up
    moment and a positive roll error for a left-up moment, matching the rule
    base.
    """
    layout = layout or RotorLayout.umbrella()
    errors = [e.delta_theta, e.delta_phi]
    prev = state.previous if state.previous is not None else errors
    axis = []
    for i, err in enumerate(errors):
        integ = state.integral[i] + err * dt
        integ = max(-gains.integral_limit, min(gains.integral_limit, integ))
        state.integral[i] = integ
        deriv = (err - prev[i]) / dt
        axis.append(gains.kp * err + gains.ki * integ + gains.kd * deriv)
    state.previous = errors
    u_roll, u_pitch = axis[1], -axis[0]
    arms = layout.mixing_matrix()
    unit = arms / np.array([[r.arm_length] for r in layout.rotors[:2]])
    half = unit.T[:4] @ np.array([u_roll, u_pitch])
    # Rotor i+4 sits opposite rotor i; negate rather than recompute so the
    # pair cancels exactly.
    deltas = np.concatenate([half, -half])
    return np.clip(deltas, -OUTPUT_LIMIT_RPM, OUTPUT_LIMIT_RPM)


class PIDController:
    name = "pid"

    def __init__(self, gains: PIDGains | None = None, dt: float = 0.01,
                 layout: RotorLayout | None = None):
        self.gains = gains or PIDGains()
        self.dt = dt
        self.layout = layout or RotorLayout.umbrella()
        self.state = PIDState()

    def reset(self) -> None:
        self.state = PIDState()

    def __call__(self, delta_theta: float, delta_phi: float) -> np.ndarray:
        return pid_control(ErrorInput(delta_theta, delta_phi), self.gains, self.state,
                           self.dt, self.layout)


class Controller(Protocol):
    name: str

    def __call__(self, delta_theta: float, delta_phi: float) -> np.ndarray: ...


@dataclass(frozen=True)
class SettleReport:
    controller: str
    settle_time: float | None
    peak_dtheta: float
    peak_dphi: float
    trace_path: str | None = None

    @property
    def settled(self) -> bool:
        return self.settle_time is not None

    def summary(self) -> str:
        st = f"{self.settle_time:.3f} s" if self.settled else "did not settle"
        return (f"{self.controller}: settle time {st}; peak |dtheta| {self.peak_dtheta:.3f} deg, "
                f"peak |dphi| {self.peak_dphi:.3f} deg")


def settle_time(t: np.ndarray, err_theta: np.ndarray, err_phi: np.ndarray, after: float,
                band: float = 0.05, hold: float = 0.2) -> float | None:
    """First t >= after from which both |errors| stay < band for ``hold`` seconds."""
    inside = (np.abs(err_theta) < band) & (np.abs(err_phi) < band)
    eps = 1e-9
    n = len(t)
    # run[i]: index of the first sample at or after i that is outside the band
    first_out = n
    run = np.empty(n, dtype=int)
    for i in range(n - 1, -1, -1):
        if not inside[i]:
            first_out = i
        run[i] = first_out
    for i in range(n):
        if t[i] < after - eps or not inside[i]:
            continue
        j = run[i]
        window_end = t[i] + hold
        if j == n:
            if t[-1] >= window_end - eps:
                return max(0.0, float(t[i] - after))
            return None
        if t[j] > window_end + eps:
            return max(0.0, float(t[i] - after))
    return None


@dataclass
class ScenarioResult:
    report: SettleReport
    trace: np.ndarray
    err_theta: np.ndarray
    err_phi: np.ndarray

    def trace_rows(self) -> list[dict[str, float]]:
        return [dict(zip(TRACE_COLUMNS, row)) for row in self.trace.tolist()]


def run_scenario(controller: Controller, disturbance: DisturbanceProfile | None = None,
                 params: CraftParams | None = None, horizon: float = 10.0,
                 band: float = 0.05, hold: float = 0.2,
                 layout: RotorLayout | None = None) -> ScenarioResult:
    """Fly the closed loop at the control rate and measure the settle time.

    Errors follow dtheta = theta_ref - theta and dphi = phi_ref - phi, in degrees.
    """
    params = params or CraftParams()
    disturbance = disturbance or DisturbanceProfile()
    layout = layout or RotorLayout.umbrella(params.arm_length)
    if hasattr(controller, "reset"):
        controller.reset()
    substeps = params.substeps
    ticks = int(round(horizon * params.control_rate))
    period = 1.0 / params.control_rate

    state = AttitudeState.hover(params)
    kicks = [e for e in disturbance.events if e.kind == "error_step" and e.duration == 0]
    holds = [e for e in disturbance.events if e.kind == "error_step" and e.duration > 0]
    pulses = [e for e in disturbance.events if e.kind == "torque"]
    kicked = 0
    rows = []
    errs = np.empty((ticks + 1, 2))
    eps = 1e-9
    for k in range(ticks + 1):
        t = k * period
        while kicked < len(kicks) and kicks[kicked].start <= t + eps:
            ev = kicks[kicked]
            state = AttitudeState(
                phi=state.phi - math.radians(ev.delta_phi),
                theta=state.theta - math.radians(ev.delta_theta),
                p=state.p, q=state.q, rotor_speeds=state.rotor_speeds, t=state.t)
            kicked += 1
        ref_theta = sum(ev.delta_theta for ev in holds if ev.start <= t + eps < ev.end)
        ref_phi = sum(ev.delta_phi for ev in holds if ev.start <= t + eps < ev.end)
        d_theta = ref_theta - math.degrees(state.theta)
        d_phi = ref_phi - math.degrees(state.phi)
        errs[k] = (d_theta, d_phi)
        deltas = np.asarray(controller(d_theta, d_phi), dtype=float)
        rows.append([t, math.degrees(state.theta), math.degrees(state.phi),
                     math.degrees(state.p), math.degrees(state.q),
                     *state.rotor_speeds, *deltas.tolist()])
        if k == ticks:
            break
        for s in range(substeps):
            ts = t + s * params.dt
            tr = sum(ev.roll for ev in pulses if ev.start <= ts + eps < ev.end)
            tp = sum(ev.pitch for ev in pulses if ev.start <= ts + eps < ev.end)
            state = step(state, deltas, params, layout=layout, torque=(tr, tp))
        # Re-anchor time to the tick grid so long runs do not drift.
        state = AttitudeState(state.phi, state.theta, state.psi, state.p, state.q, state.r,
                              state.rotor_speeds, (k + 1) * period)

    trace = np.array(rows)
    after = disturbance.end
    st = settle_time(trace[:, 0], errs[:, 0], errs[:, 1], after, band, hold)
    mask = trace[:, 0] >= after - eps
    report = SettleReport(
        controller=getattr(controller, "name", type(controller).__name__),
        settle_time=st,
        peak_dtheta=float(np.max(np.abs(errs[mask, 0]))) if mask.any() else 0.0,
        peak_dphi=float(np.max(np.abs(errs[mask, 1]))) if mask.any() else 0.0,
    )
    return ScenarioResult(report, trace, errs[:, 0], errs[:, 1])


def make_controller(name: str, gains: PIDGains | None = None, params: CraftParams | None = None,
                    fuzzy: FuzzyController | None = None) -> Controller:
    params = params or CraftParams()
    if name == "fuzzy":
        return fuzzy or FuzzyController.default()
    if name == "pid":
        return PIDController(gains, dt=1.0 / params.control_rate,
                             layout=RotorLayout.umbrella(params.arm_length))
    raise ValueError(f"unknown controller {name!r} (expected 'fuzzy' or 'pid')")
