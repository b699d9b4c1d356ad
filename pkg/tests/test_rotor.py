import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from composite_pulses.exceptions import DomainError
from composite_pulses.rotor import (
    Quaternion,
    axis_angle_matrix,
    compose_matrices,
    fidelity,
    fidelity_arrays,
    infidelity,
    matrix_to_quat,
    multiply_arrays,
    quat_from_axis_angle,
    quat_multiply,
    quat_to_matrix,
)

X, Y, Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def close(q, s, v, tol=1e-12):
    return abs(q.s - s) < tol and np.allclose(q.v, v, atol=tol)


angles = st.floats(0, 4 * math.pi, allow_nan=False)
unit_axes = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda a: np.linalg.norm(a) > 1e-3).map(
    lambda a: tuple(np.asarray(a) / np.linalg.norm(a))
)
quats = st.builds(quat_from_axis_angle, angles, unit_axes)


class TestAxisAngle:
    def test_half_turn_about_x(self):
        assert close(quat_from_axis_angle(math.pi, X), 0.0, X)

    def test_zero_angle_is_identity(self):
        assert close(quat_from_axis_angle(0.0, Z), 1.0, (0, 0, 0))

    def test_quarter_turn_about_y(self):
        h = math.sqrt(0.5)  # cos(pi/4) = sin(pi/4)
        q = quat_from_axis_angle(math.pi / 2, Y)
        assert close(q, h, (0, h, 0))
        assert q.s == pytest.approx(0.70711, abs=5e-6)

    def test_rejects_non_unit_axis(self):
        with pytest.raises(DomainError, match="norm 2"):
            quat_from_axis_angle(1.0, (2, 0, 0))

    @given(angles, unit_axes)
    def test_unit_norm(self, theta, axis):
        assert abs(quat_from_axis_angle(theta, axis).norm() - 1) < 1e-12


class TestMultiply:
    def test_identity_is_neutral(self):
        q = quat_from_axis_angle(1.1, (0.6, 0.8, 0))
        assert quat_multiply(Quaternion.identity(), q) == q
        assert quat_multiply(q, Quaternion.identity()) == q

    def test_two_half_turns_make_a_full_turn(self):
        q = quat_from_axis_angle(math.pi, X)
        r = quat_multiply(q, q)
        assert close(r, -1.0, (0, 0, 0))
        assert fidelity(r, Quaternion.identity()) == 1.0

    def test_order_matches_matrix_oracle(self):
        # 90x first, then 90y
        qx = quat_from_axis_angle(math.pi / 2, X)
        qy = quat_from_axis_angle(math.pi / 2, Y)
        m = compose_matrices([axis_angle_matrix(math.pi / 2, X), axis_angle_matrix(math.pi / 2, Y)])
        assert np.allclose(quat_to_matrix(quat_multiply(qx, qy)), m, atol=1e-12)
        assert np.allclose(quat_to_matrix(quat_multiply(qx, qy)), quat_to_matrix(qy) @ quat_to_matrix(qx), atol=1e-12)
        # and the opposite order is a different rotation
        assert fidelity(quat_multiply(qx, qy), quat_multiply(qy, qx)) < 0.9

    @given(quats, quats)
    def test_homomorphism(self, a, b):
        assert np.allclose(quat_to_matrix(quat_multiply(a, b)), quat_to_matrix(b) @ quat_to_matrix(a), atol=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(quats, min_size=1, max_size=5))
    def test_norm_preserved_over_long_chains(self, base):
        q = Quaternion.identity()
        for i in range(10_000):
            q = quat_multiply(q, base[i % len(base)])
        assert abs(q.s**2 + sum(c * c for c in q.v) - 1) < 1e-9

    @given(quats, quats)
    def test_array_form_agrees(self, a, b):
        got = multiply_arrays(a.as_array()[None], b.as_array()[None])[0]
        assert np.allclose(got, quat_multiply(a, b).as_array(), atol=1e-14)


class TestFidelity:
    @given(quats)
    def test_self_fidelity(self, q):
        assert fidelity(q, q) == pytest.approx(1.0, abs=1e-15)

    @given(quats)
    def test_double_cover(self, q):
        assert fidelity(q, -q) == fidelity(q, q)

    @given(quats, quats)
    def test_symmetric(self, a, b):
        assert fidelity(a, b) == fidelity(b, a)

    @given(quats, quats)
    def test_infidelity_complements_fidelity(self, a, b):
        assert infidelity(a, b) == pytest.approx(1 - fidelity(a, b), abs=1e-13)

    def test_infidelity_keeps_precision_near_one(self):
        q = quat_from_axis_angle(1.0, X)
        r = quat_from_axis_angle(1.0 + 2e-9, X)
        # relative angle 2e-9 -> 1 - cos(1e-9) = 5e-19
        assert infidelity(q, r) == pytest.approx(5e-19, rel=1e-6)

    def test_full_turn_equals_identity(self):
        assert fidelity(quat_from_axis_angle(2 * math.pi, Z), Quaternion.identity()) == pytest.approx(1.0, abs=1e-15)

    def test_array_form(self):
        a = quat_from_axis_angle(0.3, X)
        b = quat_from_axis_angle(0.9, Y)
        assert fidelity_arrays(a.as_array(), b.as_array()) == pytest.approx(fidelity(a, b), abs=1e-15)


class TestMatrixOracle:
    def test_identity(self):
        assert np.array_equal(quat_to_matrix(Quaternion.identity()), np.eye(3))

    def test_half_turn_about_x(self):
        assert np.allclose(quat_to_matrix(Quaternion(0.0, (1.0, 0.0, 0.0))), np.diag([1, -1, -1]))

    @given(quats)
    def test_proper_orthogonal(self, q):
        m = quat_to_matrix(q)
        assert np.allclose(m.T @ m, np.eye(3), atol=1e-10)
        assert abs(np.linalg.det(m) - 1) < 1e-10

    @given(angles, unit_axes)
    def test_rodrigues_matches_quaternion_map(self, theta, axis):
        assert np.allclose(axis_angle_matrix(theta, axis), quat_to_matrix(quat_from_axis_angle(theta, axis)), atol=1e-12)

    @given(quats)
    def test_round_trip(self, q):
        assert fidelity(matrix_to_quat(quat_to_matrix(q)), q) == pytest.approx(1.0, abs=1e-12)

    def test_rodrigues_rejects_non_unit_axis(self):
        with pytest.raises(DomainError):
            axis_angle_matrix(1.0, (1, 1, 0))
