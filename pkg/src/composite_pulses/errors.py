"""Rotations actually produced by imperfect pulses.

A pulse of nominal angle ``theta`` and phase ``phi`` subject to an
off-resonance fraction ``f`` and a fractional length error ``g`` rotates by

    theta' = theta * (1 + g) * sqrt(1 + f**2)

about the tilted axis ``(cos phi, sin phi, f) / sqrt(1 + f**2)``: the tilted
effective field acts for a mis-set duration.  With ``g = 0`` this is the usual
off-resonance pulse, and with ``f = 0`` a pure pulse-length error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from composite_pulses.exceptions import DomainError
from composite_pulses.rotor import (
    Quaternion,
    axis_angle_matrix,
    compose_matrices,
    multiply_arrays,
    quat_from_axis_angle,
    quat_multiply,
)

TWO_PI = 2.0 * math.pi


def normalize_phase(phi: float) -> float:
    """Reduce a phase to ``[0, 2*pi)``."""
    r = math.fmod(phi, TWO_PI)
    if r < 0:
        r += TWO_PI
    # fmod of a value just below a multiple of 2*pi can round up to 2*pi
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class Pulse:
    """One RF pulse: nominal rotation angle and phase, both in radians."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta) or theta < 0:
            raise DomainError(f"pulse angle must be finite and >= 0, got {theta!r}")
        if not math.isfinite(self.phi):
            raise DomainError(f"pulse phase must be finite, got {self.phi!r}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", normalize_phase(float(self.phi)))

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> Pulse:
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    @property
    def phi_deg(self) -> float:
        return math.degrees(self.phi)


@dataclass(frozen=True)
class ErrorModel:
    """Systematic error setting: off-resonance fraction ``f``, length error ``g``."""

    f: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.f):
            raise DomainError(f"off-resonance fraction f must be finite, got {self.f!r}")
        if not math.isfinite(self.g) or self.g <= -1.0:
            raise DomainError(f"pulse-length error g must be finite and > -1, got {self.g!r}")


NO_ERROR = ErrorModel()


def effective_rotation(p: Pulse, e: ErrorModel = NO_ERROR) -> tuple[float, tuple[float, float, float]]:
    """Actual rotation angle and unit axis of pulse ``p`` under errors ``e``."""
    r = math.sqrt(1.0 + e.f * e.f)
    angle = p.theta * (1.0 + e.g) * r
    axis = (math.cos(p.phi) / r, math.sin(p.phi) / r, e.f / r)
    return angle, axis


def pulse_quaternion(p: Pulse, e: ErrorModel = NO_ERROR) -> Quaternion:
    angle, axis = effective_rotation(p, e)
    return quat_from_axis_angle(angle, axis)


def _pulses(seq):
    pulses = tuple(getattr(seq, "pulses", seq))
    if not pulses:
        raise DomainError("pulse sequence is empty")
    return pulses


def sequence_quaternion(seq, e: ErrorModel = NO_ERROR) -> Quaternion:
    """Composite rotation of a pulse sequence (or plain iterable of pulses), in time order."""
    pulses = _pulses(seq)
    q = pulse_quaternion(pulses[0], e)
    for p in pulses[1:]:
        q = quat_multiply(q, pulse_quaternion(p, e))
    return q


def sequence_matrix(seq, e: ErrorModel = NO_ERROR) -> np.ndarray:
    """Oracle: the same composite rotation built from 3x3 matrices only."""
    mats = []
    for p in _pulses(seq):
        angle, axis = effective_rotation(p, e)
        mats.append(axis_angle_matrix(angle, axis))
    return compose_matrices(mats)


def sequence_quaternion_array(seq, f, g) -> np.ndarray:
    """Composite quaternions over broadcast arrays of ``f`` and ``g``; shape ``(..., 4)``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if np.any(g <= -1.0) or not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
        raise DomainError("error arrays must be finite with g > -1")
    f, g = np.broadcast_arrays(f, g)
    r = np.sqrt(1.0 + f * f)
    q = None
    for p in _pulses(seq):
        half = 0.5 * p.theta * (1.0 + g) * r
        sh = np.sin(half) / r
        pq = np.stack([np.cos(half), sh * math.cos(p.phi), sh * math.sin(p.phi), sh * f], axis=-1)
        q = pq if q is None else multiply_arrays(q, pq)
    return q
