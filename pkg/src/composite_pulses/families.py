"""Constructors for the CORPSE, SCROFULOUS and BB1/Wn composite pulse families.

All constructors build sequences for a target rotation ``theta`` about an axis
of phase ``phi`` (default: x).  Every emitted sequence is checked to implement
its target exactly when no error is present.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from scipy.optimize import bisect

from composite_pulses.errors import NO_ERROR, Pulse, normalize_phase, pulse_quaternion, sequence_quaternion
from composite_pulses.exceptions import DomainError
from composite_pulses.rotor import fidelity

TWO_PI = 2.0 * math.pi
SELF_CHECK_TOL = 1e-9
_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class FamilyTag:
    """Which family a sequence belongs to, with its defining options."""

    kind: str
    params: tuple = ()

    @property
    def descriptor(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={_fmt_param(v)}" for k, v in self.params)
        return f"{self.kind}({inner})"

    @classmethod
    def from_descriptor(cls, text: str) -> FamilyTag:
        m = re.fullmatch(r"\s*([A-Za-z_][\w-]*)\s*(?:\((.*)\))?\s*", text)
        if m is None:
            raise DomainError(f"malformed family descriptor {text!r}")
        params = []
        if m.group(2):
            for item in m.group(2).split(","):
                key, sep, value = item.partition("=")
                if not sep:
                    raise DomainError(f"malformed family parameter {item!r} in {text!r}")
                params.append((key.strip(), _parse_param(value.strip())))
        return cls(m.group(1), tuple(params))

    def __str__(self):
        return self.descriptor


def _fmt_param(v):
    if isinstance(v, tuple):
        # trailing ';' keeps one-element tuples distinguishable from scalars
        return ";".join(_fmt_param(x) for x in v) + (";" if len(v) == 1 else "")
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_param(s: str):
    if ";" in s:
        return tuple(_parse_param(x) for x in s.split(";") if x)
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


@dataclass(frozen=True)
class PulseSequence:
    """Time-ordered pulses plus the ideal rotation they jointly implement."""

    pulses: tuple[Pulse, ...]
    target: Pulse
    family: FamilyTag = field(default_factory=lambda: FamilyTag("custom"))

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise DomainError("a pulse sequence needs at least one pulse")

    def __len__(self):
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    @property
    def total_angle(self) -> float:
        """Sum of nominal rotation angles (a proxy for sequence duration)."""
        return sum(p.theta for p in self.pulses)

    def zero_error_fidelity(self) -> float:
        return fidelity(sequence_quaternion(self, NO_ERROR), pulse_quaternion(self.target, NO_ERROR))

    def to_dict(self) -> dict:
        return {
            "pulses": [{"theta_deg": p.theta_deg, "phi_deg": p.phi_deg} for p in self.pulses],
            "target": {"theta_deg": self.target.theta_deg, "phi_deg": self.target.phi_deg},
            "family": self.family.descriptor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PulseSequence:
        try:
            pulses = [Pulse.from_degrees(float(p["theta_deg"]), float(p["phi_deg"])) for p in data["pulses"]]
            target = Pulse.from_degrees(float(data["target"]["theta_deg"]), float(data["target"]["phi_deg"]))
            family = FamilyTag.from_descriptor(str(data.get("family", "custom")))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed pulse sequence record: {exc}") from None
        return cls(tuple(pulses), target, family)


def _checked(seq: PulseSequence) -> PulseSequence:
    fid = seq.zero_error_fidelity()
    if fid < 1.0 - SELF_CHECK_TOL:
        raise ArithmeticError(f"{seq.family} sequence misses its target without errors (fidelity {fid!r})")
    return seq


def _check_target_angle(theta, lo=0.0, hi=TWO_PI, lo_open=False):
    ok = (theta > lo if lo_open else theta >= lo) and theta <= hi
    if not (math.isfinite(theta) and ok):
        bracket = "(" if lo_open else "["
        raise DomainError(
            f"target angle {math.degrees(theta):.6g} deg outside {bracket}{math.degrees(lo):g}, {math.degrees(hi):g}] deg"
        )


# ---------------------------------------------------------------------------
# Plain pulses and phase offsets
# ---------------------------------------------------------------------------


def build_plain(theta: float, phi: float = 0.0) -> PulseSequence:
    p = Pulse(theta, phi)
    return PulseSequence((p,), p, FamilyTag("plain"))


def offset_phases(seq: PulseSequence, delta_phi: float) -> PulseSequence:
    """Rotate every pulse phase (and the target phase) by ``delta_phi``."""
    pulses = tuple(Pulse(p.theta, p.phi + delta_phi) for p in seq.pulses)
    return PulseSequence(pulses, Pulse(seq.target.theta, seq.target.phi + delta_phi), seq.family)


# ---------------------------------------------------------------------------
# CORPSE family: pulses along +x, -x, +x
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpseIndices:
    """Integers choosing a member of the CORPSE family; (1, 1, 0) is CORPSE proper."""

    n1: int = 1
    n2: int = 1
    n3: int = 0

    def __post_init__(self):
        for name in ("n1", "n2", "n3"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise DomainError(f"CORPSE index {name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        """Number of additional full turns, ``n1 - n2 + n3``."""
        return self.n1 - self.n2 + self.n3

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)


CORPSE = CorpseIndices(1, 1, 0)
SHORT_CORPSE = CorpseIndices(0, 1, 0)


def corpse_angles(theta: float, idx: CorpseIndices = CORPSE) -> tuple[float, float, float]:
    """Nominal angles of the three CORPSE-family pulses (phases 0, pi, 0)."""
    _check_target_angle(theta)
    k = math.asin(math.sin(theta / 2) / 2)
    angles = (
        TWO_PI * idx.n1 + theta / 2 - k,
        TWO_PI * idx.n2 - 2 * k,
        TWO_PI * idx.n3 + theta / 2 - k,
    )
    out = []
    for i, a in enumerate(angles, start=1):
        if a < -_ANGLE_SLACK:
            raise DomainError(
                f"CORPSE indices {idx.as_tuple()} give negative pulse {i} angle "
                f"({math.degrees(a):.6g} deg) for target {math.degrees(theta):.6g} deg"
            )
        out.append(max(a, 0.0))
    return tuple(out)


def build_corpse(theta: float, idx: CorpseIndices = CORPSE, phi: float = 0.0) -> PulseSequence:
    t1, t2, t3 = corpse_angles(theta, idx)
    seq = PulseSequence(
        (Pulse(t1, 0.0), Pulse(t2, math.pi), Pulse(t3, 0.0)),
        Pulse(theta, 0.0),
        FamilyTag("corpse", (("n1", idx.n1), ("n2", idx.n2), ("n3", idx.n3))),
    )
    return _checked(offset_phases(seq, phi) if phi else seq)


# ---------------------------------------------------------------------------
# SCROFULOUS: (theta1, phi1) (pi, phi2) (theta1, phi1)
# ---------------------------------------------------------------------------


def sinc(x: float) -> float:
    """Unnormalised sinc, ``sin(x) / x``."""
    return math.sin(x) / x if x != 0.0 else 1.0


def arcsinc(y: float) -> float:
    """Inverse of :func:`sinc` on the branch ``(0, pi]``, for ``0 <= y < 1``.

    sinc falls monotonically from 1 to 0 on this branch, so the root is
    bracketed by ``(0, pi]`` and found by bisection to 1e-12.
    """
    if not (0.0 <= y < 1.0):
        raise DomainError(f"arcsinc argument must lie in [0, 1), got {y!r}")
    if sinc(math.pi) - y >= 0.0:
        # float sinc(pi) is ~4e-17, not 0
        return math.pi
    return bisect(lambda x: sinc(x) - y, 0.0, math.pi, xtol=1e-13, maxiter=200)


def _safe_arccos(x: float, what: str) -> float:
    if abs(x) > 1.0 + 1e-12:
        raise DomainError(f"{what}: arccos argument {x!r} outside [-1, 1]")
    return math.acos(max(-1.0, min(1.0, x)))


def scrofulous_params(theta: float, sign: int = -1) -> tuple[float, float, float, float]:
    """``(theta1, phi1, theta2, phi2)`` of the SCROFULOUS sequence for a ``theta``-x target.

    ``sign=-1`` is the standard branch; ``sign=+1`` selects the mirror-image
    branch ``phi2 = phi1 + arccos(-pi / (2 theta1))``, which needs ``phi1``
    negated to keep the target about +x.
    """
    if sign not in (-1, 1):
        raise DomainError(f"SCROFULOUS branch sign must be -1 or +1, got {sign!r}")
    _check_target_angle(theta, 0.0, math.pi, lo_open=True)
    theta1 = arcsinc(2 * math.cos(theta / 2) / math.pi)
    phi1 = _safe_arccos(-math.pi * math.cos(theta1) / (2 * theta1 * math.sin(theta / 2)), "SCROFULOUS phi1")
    shift = _safe_arccos(-math.pi / (2 * theta1), "SCROFULOUS phi2")
    if sign > 0:
        phi1 = -phi1
    phi2 = phi1 + sign * shift
    return theta1, normalize_phase(phi1), math.pi, normalize_phase(phi2)


SCROFULOUS_TABULATED_DEG = (30.0, 180.0)


def scrofulous_is_extrapolated(theta: float) -> bool:
    """True outside the 30-180 degree range covered by the reference table."""
    lo, hi = SCROFULOUS_TABULATED_DEG
    d = math.degrees(theta)
    return not (lo - 1e-9 <= d <= hi + 1e-9)


def build_scrofulous(theta: float, phi: float = 0.0, sign: int = -1) -> PulseSequence:
    t1, p1, t2, p2 = scrofulous_params(theta, sign)
    params = () if sign == -1 else (("sign", sign),)
    seq = PulseSequence(
        (Pulse(t1, p1), Pulse(t2, p2), Pulse(t1, p1)),
        Pulse(theta, 0.0),
        FamilyTag("scrofulous", params),
    )
    return _checked(offset_phases(seq, phi) if phi else seq)


# ---------------------------------------------------------------------------
# BB1 and Wn: theta_x pulse with n identical 180_phi1 360_3phi1 180_phi1 blocks
# ---------------------------------------------------------------------------


def wn_phases(theta: float, n: int = 1) -> tuple[float, float]:
    """Phases ``(phi1, phi2 = 3 phi1)`` of each of ``n`` identical correction blocks."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"number of correction blocks must be a positive integer, got {n!r}")
    _check_target_angle(theta)
    phi1 = _safe_arccos(-theta / (4 * n * math.pi), "Wn phi1")
    return phi1, normalize_phase(3 * phi1)


def build_bb1(theta: float, n: int = 1, placements=None, phi: float = 0.0) -> PulseSequence:
    """``theta``-x pulse with ``n`` Wn blocks inserted at fractional ``placements``.

    A placement ``p`` puts a block after a rotation of ``p * theta`` of the main
    pulse: ``[0]`` is original BB1 (block first), ``[1]`` the reversed variant,
    ``[0.5]`` the time-symmetric form.  Zero-length fragments are dropped.
    """
    phi1, phi2 = wn_phases(theta, n)
    if placements is None:
        placements = [0.0] * int(n)
    placements = [float(p) for p in placements]
    if len(placements) != n:
        raise DomainError(f"need {n} placements for {n} correction blocks, got {len(placements)}")
    for p in placements:
        if not (0.0 <= p <= 1.0):
            raise DomainError(f"placement {p!r} outside [0, 1]")
    block = (Pulse(math.pi, phi1), Pulse(TWO_PI, phi2), Pulse(math.pi, phi1))
    pulses = []
    done = 0.0
    for p in sorted(placements):
        if p > done:
            pulses.append(Pulse((p - done) * theta, 0.0))
            done = p
        pulses.extend(block)
    if done < 1.0:
        pulses.append(Pulse((1.0 - done) * theta, 0.0))
    # theta == 0 leaves zero-angle fragments; drop them unless nothing else remains
    pulses = [p for p in pulses if p.theta > 0.0] or pulses
    kind = "bb1" if n == 1 else "wn"
    seq = PulseSequence(
        tuple(pulses),
        Pulse(theta, 0.0),
        FamilyTag(kind, (("n", int(n)), ("placements", tuple(placements)))),
    )
    return _checked(offset_phases(seq, phi) if phi else seq)
