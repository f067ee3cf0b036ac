import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from se3loss import rotations as so3
from se3loss.exceptions import GimbalLockWarning, NotARotation

QUARTER_Z = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def random_axis_angle(rng, n, lo=0.0, hi=np.pi):
    axis = rng.normal(size=(n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    return axis * rng.uniform(lo, hi, size=(n, 1))


def test_exp_trivial():
    assert np.array_equal(so3.exp_so3(np.zeros(3)), np.eye(3))
    np.testing.assert_allclose(so3.exp_so3([0, 0, np.pi / 2]), QUARTER_Z, atol=1e-15)


def test_exp_matches_matrix_exponential(rng):
    r = random_axis_angle(rng, 500, hi=np.pi)
    expected = np.array([expm(so3.skew(x)) for x in r])
    np.testing.assert_allclose(so3.exp_so3(r), expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("scale", [0.0, 1e-12, 1e-9, 1e-6, 1e-4 * 0.999, 1e-4 * 1.001, 1.0, 3.1])
def test_exp_is_orthonormal(rng, scale):
    r = random_axis_angle(rng, 50, scale, scale + 1e-15)
    R = so3.exp_so3(r)
    err = np.abs(np.swapaxes(R, -1, -2) @ R - np.eye(3)).max()
    assert err < 1e-12
    assert np.abs(np.linalg.det(R) - 1.0).max() < 1e-12


def test_log_trivial():
    assert np.array_equal(so3.log_so3(np.eye(3)), np.zeros(3))
    np.testing.assert_allclose(so3.log_so3(QUARTER_Z), [0, 0, np.pi / 2], atol=1e-15)
    np.testing.assert_allclose(so3.log_so3(np.diag([1.0, -1.0, -1.0])), [np.pi, 0, 0], atol=1e-15)


@pytest.mark.parametrize("band", [1e-9, 1e-5, 1.0, np.pi / 2, 2.5, np.pi - 1e-4, np.pi - 1e-6])
def test_log_exp_round_trip_bands(rng, band):
    r = random_axis_angle(rng, 200, band, band)
    np.testing.assert_allclose(so3.log_so3(so3.exp_so3(r)), r, rtol=0, atol=1e-9)


def test_exp_log_round_trip_at_pi(rng):
    r = random_axis_angle(rng, 200, np.pi, np.pi)
    R = so3.exp_so3(r)
    back = so3.exp_so3(so3.log_so3(R))
    assert np.abs(back - R).max() < 1e-9
    assert np.all(np.linalg.norm(so3.log_so3(R), axis=1) <= np.pi + 1e-12)


def test_log_rejects_non_rotation():
    with pytest.raises(NotARotation):
        so3.log_so3(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(NotARotation):
        so3.log_so3(np.eye(3) * 1.01)
    # within tolerance is accepted
    so3.log_so3(np.eye(3) + 1e-8)


def test_matches_scipy_rotvec(rng):
    R = Rotation.random(500, random_state=1).as_matrix()
    np.testing.assert_allclose(so3.log_so3(R), Rotation.from_matrix(R).as_rotvec(), atol=1e-12)


def test_jacobians_against_finite_differences(rng):
    h = 1e-6
    for r in random_axis_angle(rng, 20, 1e-3, np.pi - 0.1):
        R = so3.exp_so3(r)
        cols = [(so3.log_so3(R.T @ so3.exp_so3(r + h * e)) - so3.log_so3(R.T @ so3.exp_so3(r - h * e)))
                / (2 * h) for e in np.eye(3)]
        np.testing.assert_allclose(np.stack(cols, axis=1), so3.right_jacobian(r), atol=1e-8)
        np.testing.assert_allclose(so3.right_jacobian_inv(r) @ so3.right_jacobian(r), np.eye(3),
                                   atol=1e-12)
        np.testing.assert_allclose(so3.left_jacobian_inv(r) @ so3.left_jacobian(r), np.eye(3),
                                   atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, 1e-8, 9.9e-3, 1.01e-2, 1.0])
def test_jacobian_series_branch_is_continuous(theta):
    r = np.array([1.0, 2.0, -2.0]) / 3.0 * theta
    np.testing.assert_allclose(so3.right_jacobian_inv(r) @ so3.right_jacobian(r), np.eye(3),
                               atol=1e-14)


def test_convert_examples():
    q = so3.convert([0, 0, np.pi / 2], "axisangle", "quat")
    np.testing.assert_allclose(q, [np.sqrt(0.5), 0, 0, np.sqrt(0.5)], atol=1e-15)
    np.testing.assert_array_equal(so3.convert([1.0, 0, 0, 0], "quat", "euler"), [0, 0, 0])


def test_quaternion_matches_scipy(rng):
    r = random_axis_angle(rng, 300)
    q = so3.convert(r, "axisangle", "quat")
    xyzw = Rotation.from_rotvec(r).as_quat()
    ref = so3.canonical_quat(np.concatenate([xyzw[:, 3:], xyzw[:, :3]], axis=1))
    np.testing.assert_allclose(q, ref, atol=1e-12)
    assert np.all(q[:, 0] >= 0)


def test_euler_matches_scipy_intrinsic_zyx(rng):
    R = Rotation.random(300, random_state=2)
    ypr = so3.convert(R.as_matrix(), "matrix", "euler")
    np.testing.assert_allclose(Rotation.from_euler("ZYX", ypr).as_matrix(), R.as_matrix(),
                               atol=1e-12)
    assert np.all(np.abs(ypr[:, 1]) <= np.pi / 2)


def test_conversion_chain_round_trip(rng):
    r = random_axis_angle(rng, 1000)
    q = so3.convert(r, "axisangle", "quat")
    R = so3.convert(q, "quat", "matrix")
    e = so3.convert(R, "matrix", "euler")
    back = so3.convert(e, "euler", "axisangle")
    angle = so3.angle_between(so3.exp_so3(r), so3.exp_so3(back))
    assert angle.max() < 1e-9


def test_quaternion_double_cover_exact(rng):
    q = rng.normal(size=(500, 4))
    assert np.array_equal(so3.convert(q, "quat", "matrix"), so3.convert(-q, "quat", "matrix"))
    assert np.array_equal(so3.canonical_quat(q), so3.canonical_quat(-q))


def test_canonical_quat_tie_break():
    np.testing.assert_array_equal(so3.canonical_quat([0.0, -1.0, 0.0, 0.0]), [0, 1, 0, 0])
    np.testing.assert_array_equal(so3.canonical_quat([0.0, 0.0, -2.0, 0.0]), [0, 0, 1, 0])


def test_gimbal_lock_warning_preserves_rotation():
    R = so3.euler_to_matrix([0.3, np.pi / 2, -0.2])
    with pytest.warns(GimbalLockWarning):
        e = so3.matrix_to_euler(R)
    assert so3.is_gimbal_locked(e[1])
    assert e[2] == 0.0
    np.testing.assert_allclose(so3.euler_to_matrix(e), R, atol=1e-9)


def test_no_warning_away_from_gimbal():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        so3.matrix_to_euler(so3.euler_to_matrix([0.3, 1.0, -0.2]))


def test_canonical_axis_angle_folds_long_angles():
    r = np.array([0.0, 0.0, 1.5 * np.pi])
    np.testing.assert_allclose(so3.canonical_axis_angle(r), [0, 0, -0.5 * np.pi], atol=1e-12)


def test_unknown_representation():
    with pytest.raises(ValueError):
        so3.convert(np.zeros(3), "axisangle", "rodrigues")


finite3 = arrays(np.float64, 3, elements=st.floats(-np.pi, np.pi, allow_nan=False))


@settings(max_examples=200, deadline=None)
@given(finite3)
def test_property_exp_log(r):
    R = so3.exp_so3(r)
    assert np.abs(so3.exp_so3(so3.log_so3(R)) - R).max() < 1e-9
    if np.linalg.norm(r) <= np.pi - 1e-6:
        assert np.abs(so3.log_so3(R) - r).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(finite3, st.sampled_from(["quat", "matrix", "euler"]))
def test_property_convert_round_trip(r, via):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GimbalLockWarning)
        back = so3.convert(so3.convert(r, "axisangle", via), via, "axisangle")
    assert so3.angle_between(so3.exp_so3(r), so3.exp_so3(back)) < 1e-9
