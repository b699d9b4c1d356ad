"""Composite rotation pulses (CORPSE, SCROFULOUS, BB1/Wn) and their error analysis."""

from composite_pulses.rotor import Quaternion, fidelity, infidelity, quat_from_axis_angle, quat_multiply, quat_to_matrix
from composite_pulses.errors import ErrorModel, Pulse, pulse_quaternion, sequence_quaternion
from composite_pulses.families import (
    CorpseIndices,
    PulseSequence,
    build_bb1,
    build_corpse,
    build_plain,
    build_scrofulous,
    corpse_angles,
    offset_phases,
    scrofulous_params,
    wn_phases,
)
from composite_pulses.analysis import crossover, first_order_deviation, grid, series_coefficients, sweep

__version__ = "0.1.0"

__all__ = [
    "Quaternion",
    "fidelity",
    "infidelity",
    "quat_from_axis_angle",
    "quat_multiply",
    "quat_to_matrix",
    "ErrorModel",
    "Pulse",
    "pulse_quaternion",
    "sequence_quaternion",
    "CorpseIndices",
    "PulseSequence",
    "build_bb1",
    "build_corpse",
    "build_plain",
    "build_scrofulous",
    "corpse_angles",
    "offset_phases",
    "scrofulous_params",
    "wn_phases",
    "crossover",
    "first_order_deviation",
    "grid",
    "series_coefficients",
    "sweep",
]
