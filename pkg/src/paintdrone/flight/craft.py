"""Octocopter geometry, craft constants and the roll/pitch rigid-body step.

Body frame: x forward (side 1), y left (side 2), z up. Roll phi is positive
when the left side rises, pitch theta is positive when the nose drops (both
right-handed rotations about +x and +y). The pitch torque reported by
``body_torques`` is the nose-up moment sum(f * l * cos(azimuth)), so
theta'' = -tau_pitch / I_pitch while phi'' = tau_roll / I_roll.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..fuzzy.rules import ROTORS

GRAVITY = 9.81

# Table 1 masses (kg): camera, 8 rotors, frame, arm, FPGA, 2 batteries, 8 sensors, IMU/GPS.
TOTAL_MASS = 16.751
ROTOR_MASS = 1.038
ARM_LENGTH = 0.6
# Rotor rated thrust 21.6 kgf at the no-load speed of a 100 Kv motor. The two
# 688 g, 10 Ah packs are 3S cells; wired in series they give 22.2 V.
ROTOR_MAX_THRUST = 21.6 * GRAVITY
ROTOR_MAX_SPEED = 100.0 * 22.2 * 2.0 * math.pi / 60.0
# Lumped aerodynamic rate damping (N*m*s/rad) about roll and pitch.
RATE_DAMPING = 73.0


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Rotor:
    ident: str
    azimuth: float
    arm_length: float
    spin: int


@dataclass(frozen=True)
class RotorLayout:
    """Eight rotors 45 deg apart; each side's R/L rotors sit 22.5 deg either side of its axis.

    Looking outward along a side's axis, R is the clockwise (right-hand) neighbour.
    """

    rotors: tuple[Rotor, ...]

    def __post_init__(self) -> None:
        if tuple(r.ident for r in self.rotors) != ROTORS:
            raise ValueError(f"rotor order must be {ROTORS}")
        az = sorted(round(math.degrees(r.azimuth) % 360.0, 9) for r in self.rotors)
        gaps = [(b - a) for a, b in zip(az, az[1:] + [az[0] + 360.0])]
        if any(abs(g - 45.0) > 1e-6 for g in gaps):
            raise ValueError(f"rotors must be spaced 45 deg apart, got azimuths {az}")
        for a, b in zip(self.rotors[:4], self.rotors[4:]):
            opposite = abs(((b.azimuth - a.azimuth) % (2 * math.pi)) - math.pi) < 1e-9
            if not opposite or a.arm_length != b.arm_length:
                raise ValueError(f"rotor {b.ident} must sit opposite {a.ident} on an equal arm")

    @classmethod
    def umbrella(cls, arm_length: float = ARM_LENGTH) -> "RotorLayout":
        rotors = []
        for side in range(4):
            axis = side * 90.0
            for k, (suffix, offset) in enumerate((("R", -22.5), ("L", 22.5))):
                spin = 1 if (2 * side + k) % 2 == 0 else -1
                rotors.append(Rotor(f"{side + 1}{suffix}", math.radians(axis + offset),
                                    arm_length, spin))
        return cls(tuple(rotors))

    def mixing_matrix(self) -> np.ndarray:
        """2x8 moment arms: row 0 roll (l sin az), row 1 pitch (l cos az)."""
        return np.array([
            [r.arm_length * math.sin(r.azimuth) for r in self.rotors],
            [r.arm_length * math.cos(r.azimuth) for r in self.rotors],
        ])


def _default_inertia() -> float:
    # Rotors as point masses on the arm octagon; everything else a 0.4 m square plate.
    rotors = 8 * ROTOR_MASS * ARM_LENGTH**2 / 2.0
    body = (TOTAL_MASS - 8 * ROTOR_MASS) * 0.4**2 / 12.0
    return rotors + body


def _default_lift_constant() -> float:
    return ROTOR_MAX_THRUST / ROTOR_MAX_SPEED**2


@dataclass(frozen=True)
class CraftParams:
    mass: float = TOTAL_MASS
    inertia_roll: float = field(default_factory=_default_inertia)
    inertia_pitch: float = field(default_factory=_default_inertia)
    lift_constant: float = field(default_factory=_default_lift_constant)
    arm_length: float = ARM_LENGTH
    slew_limit: float = 12.0
    max_rotor_speed: float = ROTOR_MAX_SPEED
    rate_damping: float = RATE_DAMPING
    dt: float = 0.001
    control_rate: float = 100.0

    def __post_init__(self) -> None:
        for name in ("mass", "inertia_roll", "inertia_pitch", "lift_constant", "arm_length",
                     "slew_limit", "max_rotor_speed", "dt", "control_rate"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.rate_damping) and self.rate_damping >= 0):
            raise ValueError(f"rate_damping must be >= 0, got {self.rate_damping}")
        if self.hover_speed > self.max_rotor_speed:
            raise ValueError("craft cannot hover: hover speed exceeds max rotor speed")

    @property
    def hover_speed(self) -> float:
        """Speed at which eight rotors carry the weight: 8 k w^2 = m g."""
        return math.sqrt(self.mass * GRAVITY / (8.0 * self.lift_constant))

    @property
    def substeps(self) -> int:
        n = round(1.0 / (self.control_rate * self.dt))
        if n < 1 or abs(n * self.dt * self.control_rate - 1.0) > 1e-9:
            raise ValueError("control period must be a whole number of integration steps")
        return n

    def with_(self, **changes) -> "CraftParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class AttitudeState:
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    rotor_speeds: tuple[float, ...] = ()
    t: float = 0.0

    @classmethod
    def hover(cls, params: CraftParams) -> "AttitudeState":
        return cls(rotor_speeds=(params.hover_speed,) * 8)

    def check(self, params: CraftParams) -> None:
        vals = (self.phi, self.theta, self.psi, self.p, self.q, self.r, self.t, *self.rotor_speeds)
        if not all(math.isfinite(v) for v in vals):
            raise SimulationError(f"non-finite state at t={self.t}: {self}")
        if len(self.rotor_speeds) != 8:
            raise SimulationError("state must carry eight rotor speeds")
        if any(w < 0 or w > params.max_rotor_speed + 1e-9 for w in self.rotor_speeds):
            raise SimulationError(f"rotor speed out of range at t={self.t}: {self.rotor_speeds}")


def rotor_thrust(w, k: float):
    """Lift f = k w^2 for non-negative rotor speed w (rad/s)."""
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr < 0):
        raise ValueError("rotor speed must be non-negative")
    f = k * w_arr * w_arr
    return float(f) if f.ndim == 0 else f


def body_torques(state: AttitudeState, layout: RotorLayout, k: float) -> tuple[float, float]:
    """(roll, pitch) torques in N*m; see the module docstring for signs."""
    f = rotor_thrust(np.asarray(state.rotor_speeds), k)
    arms = layout.mixing_matrix()
    # Summed over opposite pairs so equal thrusts cancel exactly.
    diff = f[:4] - f[4:]
    roll = float(np.dot(arms[0, :4], diff))
    pitch = float(np.dot(arms[1, :4], diff))
    return roll, pitch


def step(state: AttitudeState, deltas_rpm, params: CraftParams, dt: float | None = None,
         layout: RotorLayout | None = None, torque: tuple[float, float] = (0.0, 0.0)) -> AttitudeState:
    """Advance one integration step.

    Rotor speeds slew toward hover + commanded delta by at most
    ``slew_limit * dt``; roll/pitch use semi-implicit Euler. ``torque`` is an
    external (roll, pitch) disturbance in the same sign convention as
    ``body_torques``.
    """
    dt = params.dt if dt is None else dt
    if not dt > 0:
        raise ValueError("dt must be > 0")
    layout = layout or RotorLayout.umbrella(params.arm_length)
    w = np.asarray(state.rotor_speeds, dtype=float)
    target = params.hover_speed + np.asarray(deltas_rpm, dtype=float) * (2.0 * math.pi / 60.0)
    target = np.clip(target, 0.0, params.max_rotor_speed)
    max_change = params.slew_limit * dt
    w_new = w + np.clip(target - w, -max_change, max_change)

    moved = replace(state, rotor_speeds=tuple(w_new.tolist()))
    tau_roll, tau_pitch = body_torques(moved, layout, params.lift_constant)
    tau_roll += torque[0]
    tau_pitch += torque[1]
    p = state.p + dt * (tau_roll - params.rate_damping * state.p) / params.inertia_roll
    q = state.q + dt * (-tau_pitch - params.rate_damping * state.q) / params.inertia_pitch
    new = AttitudeState(
        phi=state.phi + dt * p,
        theta=state.theta + dt * q,
        psi=0.0,
        p=p,
        q=q,
        r=0.0,
        rotor_speeds=moved.rotor_speeds,
        t=state.t + dt,
    )
    new.check(params)
    return new
