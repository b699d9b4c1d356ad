"""Quaternion algebra for rotations, with a rotation-matrix oracle.

Conventions
-----------
A quaternion ``{s, v}`` holds ``s = cos(theta/2)`` and ``v = sin(theta/2) * a``
for a rotation by ``theta`` about the unit axis ``a``.

``quat_multiply(q1, q2)`` is the rotation "q1 first, then q2", using the
product ``{s1 s2 - v1.v2, s1 v2 + s2 v1 + v1 x v2}``.  The matching matrix
picture is the frame (passive) one: ``quat_to_matrix`` returns the matrix that
maps coordinates in the original frame to coordinates in the rotated frame,
so a sequence ``q1, q2, ..., qn`` corresponds to ``M_n @ ... @ M_1``.

Quaternions ``q`` and ``-q`` describe the same rotation.  Compare rotations
with :func:`fidelity`, never by component equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from composite_pulses.exceptions import DomainError

_RENORM_TOL = 1e-12
_AXIS_TOL = 1e-9


@dataclass(frozen=True)
class Quaternion:
    s: float
    v: tuple[float, float, float]

    @classmethod
    def identity(cls) -> Quaternion:
        return cls(1.0, (0.0, 0.0, 0.0))

    @classmethod
    def from_array(cls, a) -> Quaternion:
        return cls(float(a[0]), (float(a[1]), float(a[2]), float(a[3])))

    def as_array(self) -> np.ndarray:
        return np.array([self.s, *self.v])

    def norm(self) -> float:
        x, y, z = self.v
        return math.sqrt(self.s * self.s + x * x + y * y + z * z)

    def __neg__(self) -> Quaternion:
        x, y, z = self.v
        return Quaternion(-self.s, (-x, -y, -z))

    def conjugate(self) -> Quaternion:
        """Inverse rotation (for unit quaternions)."""
        x, y, z = self.v
        return Quaternion(self.s, (-x, -y, -z))


def _renormalized(s, x, y, z):
    n = math.sqrt(s * s + x * x + y * y + z * z)
    if abs(n - 1.0) > _RENORM_TOL:
        return s / n, x / n, y / n, z / n
    return s, x, y, z


def quat_from_axis_angle(theta: float, axis) -> Quaternion:
    """Quaternion for a rotation by ``theta`` radians about a unit ``axis``."""
    ax, ay, az = (float(c) for c in axis)
    n = math.sqrt(ax * ax + ay * ay + az * az)
    if abs(n - 1.0) > _AXIS_TOL:
        raise DomainError(f"rotation axis must be a unit vector, got norm {n!r}")
    half = 0.5 * theta
    sh = math.sin(half)
    return Quaternion(math.cos(half), (sh * ax, sh * ay, sh * az))


def quat_multiply(q1: Quaternion, q2: Quaternion) -> Quaternion:
    """Compose two rotations: ``q1`` is applied first, then ``q2``."""
    s1, (x1, y1, z1) = q1.s, q1.v
    s2, (x2, y2, z2) = q2.s, q2.v
    s = s1 * s2 - (x1 * x2 + y1 * y2 + z1 * z2)
    x = s1 * x2 + s2 * x1 + (y1 * z2 - z1 * y2)
    y = s1 * y2 + s2 * y1 + (z1 * x2 - x1 * z2)
    z = s1 * z2 + s2 * z1 + (x1 * y2 - y1 * x2)
    s, x, y, z = _renormalized(s, x, y, z)
    return Quaternion(s, (x, y, z))


def fidelity(q1: Quaternion, q2: Quaternion) -> float:
    """Quaternion fidelity ``|s1 s2 + v1.v2|``; 1 iff the rotations coincide."""
    x1, y1, z1 = q1.v
    x2, y2, z2 = q2.v
    return min(abs(q1.s * q2.s + x1 * x2 + y1 * y2 + z1 * z2), 1.0)


def infidelity(q1: Quaternion, q2: Quaternion) -> float:
    """``1 - fidelity(q1, q2)`` evaluated without cancellation.

    Uses the relative rotation ``r`` (q2 undone after q1):
    ``1 - |r_s| = |r_v|^2 / (1 + |r_s|)``, which keeps full relative
    precision when the two rotations are close.
    """
    r = quat_multiply(q1, q2.conjugate())
    x, y, z = r.v
    return (x * x + y * y + z * z) / (1.0 + abs(r.s))


def quat_to_matrix(q: Quaternion) -> np.ndarray:
    """Frame-rotation matrix of ``q`` (see module conventions)."""
    s = q.s
    x, y, z = q.v
    # transpose of the usual active-rotation matrix
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y + s * z), 2 * (x * z - s * y)],
            [2 * (x * y - s * z), 1 - 2 * (x * x + z * z), 2 * (y * z + s * x)],
            [2 * (x * z + s * y), 2 * (y * z - s * x), 1 - 2 * (x * x + y * y)],
        ]
    )


# ---------------------------------------------------------------------------
# Matrix oracle.  Nothing below calls the quaternion product.
# ---------------------------------------------------------------------------


def axis_angle_matrix(theta: float, axis) -> np.ndarray:
    """Frame-rotation matrix for ``theta`` about ``axis`` via Rodrigues' formula."""
    a = np.asarray(axis, dtype=float)
    n = np.linalg.norm(a)
    if abs(n - 1.0) > _AXIS_TOL:
        raise DomainError(f"rotation axis must be a unit vector, got norm {n!r}")
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    active = np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)
    return active.T


def compose_matrices(matrices) -> np.ndarray:
    """Matrix of a time-ordered list of frame rotations (first element first)."""
    m = np.eye(3)
    for r in matrices:
        m = r @ m
    return m


def matrix_to_quat(m) -> Quaternion:
    """Inverse of :func:`quat_to_matrix` (Shepperd's method), sign chosen with s >= 0."""
    a = np.asarray(m, dtype=float).T  # back to the active matrix
    tr = a[0, 0] + a[1, 1] + a[2, 2]
    cand = [tr, a[0, 0], a[1, 1], a[2, 2]]
    k = int(np.argmax(cand))
    if k == 0:
        r = math.sqrt(1.0 + tr) * 2
        s, x, y, z = 0.25 * r, (a[2, 1] - a[1, 2]) / r, (a[0, 2] - a[2, 0]) / r, (a[1, 0] - a[0, 1]) / r
    elif k == 1:
        r = math.sqrt(1.0 + a[0, 0] - a[1, 1] - a[2, 2]) * 2
        s, x, y, z = (a[2, 1] - a[1, 2]) / r, 0.25 * r, (a[0, 1] + a[1, 0]) / r, (a[0, 2] + a[2, 0]) / r
    elif k == 2:
        r = math.sqrt(1.0 + a[1, 1] - a[0, 0] - a[2, 2]) * 2
        s, x, y, z = (a[0, 2] - a[2, 0]) / r, (a[0, 1] + a[1, 0]) / r, 0.25 * r, (a[1, 2] + a[2, 1]) / r
    else:
        r = math.sqrt(1.0 + a[2, 2] - a[0, 0] - a[1, 1]) * 2
        s, x, y, z = (a[1, 0] - a[0, 1]) / r, (a[0, 2] + a[2, 0]) / r, (a[1, 2] + a[2, 1]) / r, 0.25 * r
    if s < 0:
        s, x, y, z = -s, -x, -y, -z
    n = math.sqrt(s * s + x * x + y * y + z * z)
    return Quaternion(s / n, (x / n, y / n, z / n))


# ---------------------------------------------------------------------------
# Vectorised forms over arrays of shape (..., 4) laid out as (s, x, y, z).
# ---------------------------------------------------------------------------


def multiply_arrays(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Broadcasting version of :func:`quat_multiply` (same order contract)."""
    s1, v1 = q1[..., 0], q1[..., 1:]
    s2, v2 = q2[..., 0], q2[..., 1:]
    out = np.empty(np.broadcast_shapes(q1.shape, q2.shape))
    out[..., 0] = s1 * s2 - np.einsum("...i,...i->...", v1, v2)
    out[..., 1:] = s1[..., None] * v2 + s2[..., None] * v1 + np.cross(v1, v2)
    return out


def fidelity_arrays(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    return np.minimum(np.abs(np.einsum("...i,...i->...", q1, q2)), 1.0)
