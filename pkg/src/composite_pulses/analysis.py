"""Fidelity sweeps, fidelity grids, series coefficients and crossover points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from composite_pulses.errors import NO_ERROR, pulse_quaternion, sequence_quaternion_array
from composite_pulses.exceptions import BracketError, ConditioningError, DomainError
from composite_pulses.rotor import fidelity_arrays, multiply_arrays

AXES = ("f", "g")
SERIES_POWERS = (0, 2, 4, 6, 8)
SERIES_POINTS = 41
SERIES_HALF_WIDTHS = (0.02, 0.01)
RESIDUAL_GATE = 1e-10


def _check_axis(axis):
    if axis not in AXES:
        raise DomainError(f"error axis must be 'f' or 'g', got {axis!r}")


def _check_range(axis, lo, hi, count, allow_point=True):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"{axis} range must be finite, got ({lo!r}, {hi!r})")
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"sample count must be a positive integer, got {count!r}")
    if lo == hi and count == 1 and allow_point:
        pass
    elif not lo < hi:
        raise DomainError(f"{axis} range needs lo < hi, got ({lo!r}, {hi!r})")
    elif count < 2:
        raise DomainError(f"a {axis} range needs at least 2 samples, got {count}")
    if axis == "g" and lo <= -1.0:
        raise DomainError(f"pulse-length error must stay above -1, got lower bound {lo!r}")


def error_axis(lo: float, hi: float, count: int) -> np.ndarray:
    """Evenly spaced error values; a sample that should be zero is exactly zero."""
    values = np.linspace(lo, hi, int(count))
    values[np.abs(values) < 1e-12 * max(abs(lo), abs(hi), 1.0)] = 0.0
    return values


def _errors(axis, values):
    zeros = np.zeros_like(values)
    return (values, zeros) if axis == "f" else (zeros, values)


def _target(seq) -> np.ndarray:
    return pulse_quaternion(seq.target, NO_ERROR).as_array()


def sequence_id(seq) -> str:
    return f"{seq.family.descriptor}@{seq.target.theta_deg:.12g}"


def fidelity_at(seq, f, g=0.0) -> np.ndarray:
    """Fidelity of ``seq`` against its target for (broadcast) error arrays."""
    return fidelity_arrays(sequence_quaternion_array(seq, f, g), _target(seq))


def infidelity_at(seq, f, g=0.0) -> np.ndarray:
    """``1 - fidelity`` from the relative rotation, free of cancellation near 1."""
    q = sequence_quaternion_array(seq, f, g)
    t = _target(seq) * np.array([1.0, -1.0, -1.0, -1.0])
    r = multiply_arrays(q, t)
    rv = r[..., 1:]
    return np.einsum("...i,...i->...", rv, rv) / (1.0 + np.abs(r[..., 0]))


@dataclass(frozen=True)
class SweepResult:
    axis: str
    error_values: np.ndarray
    fidelities: np.ndarray
    sequence_id: str

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.error_values.tolist(), self.fidelities.tolist()))


def sweep(seq, axis: str, lo: float, hi: float, count: int) -> SweepResult:
    """Fidelity at ``count`` evenly spaced values of one error, the other held at 0.

    ``lo == hi`` with ``count == 1`` gives a single sample.
    """
    _check_axis(axis)
    _check_range(axis, lo, hi, count)
    values = error_axis(lo, hi, count)
    return SweepResult(axis, values, fidelity_at(seq, *_errors(axis, values)), sequence_id(seq))


@dataclass(frozen=True)
class FidelityGrid:
    """Fidelity over an (f, g) grid; ``fidelity[i, j]`` is at ``g_values[i]``, ``f_values[j]``."""

    f_values: np.ndarray
    g_values: np.ndarray
    fidelity: np.ndarray
    sequence_id: str = ""

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.fidelity)), self.fidelity.shape)
        return float(self.f_values[j]), float(self.g_values[i])

    def area_above(self, level: float) -> float:
        """Fraction of grid points with fidelity at least ``level``."""
        return float(np.mean(self.fidelity >= level))


def grid(seq, f_range=(-1.0, 1.0), g_range=(-0.99, 0.99), counts=(201, 201)) -> FidelityGrid:
    """Fidelity with both errors present at once, on a dense ``counts = (nf, ng)`` grid."""
    nf, ng = counts
    _check_range("f", *f_range, nf)
    _check_range("g", *g_range, ng)
    f = error_axis(f_range[0], f_range[1], nf)
    g = error_axis(g_range[0], g_range[1], ng)
    ff, gg = np.meshgrid(f, g)
    return FidelityGrid(f, g, fidelity_at(seq, ff, gg), sequence_id(seq))


@dataclass(frozen=True)
class SeriesCoefficients:
    """Even-power expansion ``F(e) = c0 + c2 e^2 + c4 e^4 + c6 e^6 + c8 e^8``."""

    axis: str
    coefficients: tuple[float, ...]
    fit_residual: float
    half_width: float

    def __getitem__(self, power: int) -> float:
        return self.coefficients[SERIES_POWERS.index(power)]

    c0 = property(lambda self: self[0])
    c2 = property(lambda self: self[2])
    c4 = property(lambda self: self[4])
    c6 = property(lambda self: self[6])
    c8 = property(lambda self: self[8])


def _fit_even(seq, axis, half_width, points):
    e = np.linspace(-half_width, half_width, points)
    y = infidelity_at(seq, *_errors(axis, e))
    x = e / half_width
    basis = np.stack([x**k for k in SERIES_POWERS], axis=1)
    a, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = float(np.sqrt(np.mean((basis @ a - y) ** 2)))
    c = -a / half_width ** np.array(SERIES_POWERS, dtype=float)
    c[0] += 1.0
    return tuple(float(v) for v in c), resid


def series_coefficients(seq, axis: str, half_width: float | None = None, points: int = SERIES_POINTS) -> SeriesCoefficients:
    """Numerical Maclaurin coefficients of the fidelity in one error.

    The infidelity is sampled at ``points`` values on ``[-w, w]`` and fitted by
    least squares on even powers 0..8 in the scaled variable ``e / w``.  If the
    RMS residual exceeds 1e-10 the window is halved before giving up.
    """
    _check_axis(axis)
    widths = SERIES_HALF_WIDTHS if half_width is None else (half_width,)
    resid = math.inf
    for w in widths:
        coeffs, resid = _fit_even(seq, axis, w, points)
        if resid <= RESIDUAL_GATE:
            return SeriesCoefficients(axis, coeffs, resid, w)
    raise ConditioningError(f"even-power fit residual {resid:.3g} above {RESIDUAL_GATE:g} for {sequence_id(seq)}")


def crossover(seq, baseline, axis: str, bracket=(0.05, 1.0), xtol: float = 1e-5) -> float:
    """Error magnitude where ``seq`` stops outperforming ``baseline``.

    Bisects ``D(e) = F_seq(e) - F_baseline(e)`` inside ``bracket``.
    """
    _check_axis(axis)
    lo, hi = bracket
    if axis == "g" and lo <= -1.0:
        raise DomainError(f"pulse-length error must stay above -1, got {lo!r}")

    def diff(x):
        f, g = _errors(axis, np.array(x, dtype=float))
        return float(fidelity_at(seq, f, g) - fidelity_at(baseline, f, g))

    d_lo, d_hi = diff(lo), diff(hi)
    if not d_lo * d_hi < 0:
        raise BracketError(
            f"no sign change of the fidelity difference on [{lo:g}, {hi:g}]: D(lo)={d_lo:.6g}, D(hi)={d_hi:.6g}",
            d_lo,
            d_hi,
        )
    return abs(bisect(diff, lo, hi, xtol=xtol))


def first_order_deviation(seq, axis: str, step: float = 1e-5) -> np.ndarray:
    """Derivative of the composite quaternion components ``(s, x, y, z)`` at zero error.

    Central differences at ``step`` and ``step / 2`` combined by one
    Richardson extrapolation.  The quaternion sign is aligned with the target
    at every sample first so that the double cover cannot flip a difference.
    """
    _check_axis(axis)
    target = _target(seq)
    e = np.array([-step, step, -step / 2, step / 2])
    q = sequence_quaternion_array(seq, *_errors(axis, e))
    q = q * np.where(q @ target < 0, -1.0, 1.0)[:, None]
    d_h = (q[1] - q[0]) / (2 * step)
    d_h2 = (q[3] - q[2]) / step
    return (4 * d_h2 - d_h) / 3


def parity_gap(seq, axis: str, eps: float) -> float:
    """``|F(+eps) - F(-eps)|`` along one error axis."""
    _check_axis(axis)
    vals = fidelity_at(seq, *_errors(axis, np.array([eps, -eps])))
    return float(abs(vals[0] - vals[1]))
