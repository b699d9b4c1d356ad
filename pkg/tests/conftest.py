import math

import numpy as np
import pytest
from scipy.linalg import expm

from composite_pulses.errors import ErrorModel

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def su2_pulse(theta, phi, f=0.0, g=0.0):
    """Spin-1/2 propagator of one pulse, built from the Hamiltonian directly.

    Uses exp(+i ...) so that time-ordered products match the library's
    composition handedness.
    """
    r = math.sqrt(1 + f * f)
    angle = theta * (1 + g) * r
    h = (math.cos(phi) * SX + math.sin(phi) * SY + f * SZ) / r
    return expm(0.5j * angle * h)


def su2_fidelity(pulses, target, f=0.0, g=0.0):
    u = np.eye(2, dtype=complex)
    for p in pulses:
        u = su2_pulse(p.theta, p.phi, f, g) @ u
    t = su2_pulse(target.theta, target.phi)
    return abs(np.trace(t.conj().T @ u)) / 2


@pytest.fixture
def no_error():
    return ErrorModel()


rad = math.radians


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
