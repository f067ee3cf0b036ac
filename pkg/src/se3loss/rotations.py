"""SO(3) kernel: exponential/logarithm maps, Jacobians and representation
conversions.

Every function broadcasts over leading axes: axis-angle vectors are
``(..., 3)``, rotation matrices ``(..., 3, 3)``, quaternions ``(..., 4)`` in
``(w, x, y, z)`` order, Euler triples ``(..., 3)`` as intrinsic Z-Y'-X''
``(yaw, pitch, roll)`` in radians.
"""

import warnings

import numpy as np

from .exceptions import GimbalLockWarning, NotARotation

SMALL_ANGLE = 1e-4
# Below this the Jacobian coefficients switch to series; truncation < 1e-18.
SERIES_ANGLE = 1e-2
GIMBAL_MARGIN = 1e-6
ORTHO_TOL = 1e-6

REPRESENTATIONS = ("axisangle", "matrix", "quat", "euler")


def skew(v):
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(m):
    m = np.asarray(m, dtype=float)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def _angle(r):
    return np.linalg.norm(r, axis=-1)


def _safe(theta, floor):
    return np.where(theta < floor, 1.0, theta)


def _sinc(theta):
    # sin(theta) / theta
    th = _safe(theta, SMALL_ANGLE)
    t2 = theta * theta
    return np.where(theta < SMALL_ANGLE, 1.0 - t2 / 6.0 + t2 * t2 / 120.0,
                    np.sin(th) / th)


def _cosc(theta):
    # (1 - cos(theta)) / theta**2, evaluated as 2 sin^2(theta/2) / theta^2
    th = _safe(theta, SMALL_ANGLE)
    t2 = theta * theta
    half = np.sin(th / 2.0) / th
    return np.where(theta < SMALL_ANGLE, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                    2.0 * half * half)


def _sinc3(theta):
    # (theta - sin(theta)) / theta**3
    th = _safe(theta, SERIES_ANGLE)
    t2 = theta * theta
    return np.where(theta < SERIES_ANGLE,
                    1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
                    (th - np.sin(th)) / th ** 3)


def _inv_coeff(theta):
    # 1/theta^2 - cot(theta/2) / (2 theta); finite on [0, pi]
    th = _safe(theta, SERIES_ANGLE)
    t2 = theta * theta
    return np.where(theta < SERIES_ANGLE,
                    1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
                    1.0 / th ** 2 - 1.0 / (2.0 * th * np.tan(th / 2.0)))


def exp_so3(r):
    """Rodrigues map from an axis-angle vector to a rotation matrix."""
    r = np.asarray(r, dtype=float)
    theta = _angle(r)[..., None, None]
    K = skew(r)
    return np.eye(3) + _sinc(theta) * K + _cosc(theta) * (K @ K)


def check_rotation(R, tol=ORTHO_TOL):
    R = np.asarray(R, dtype=float)
    if R.shape[-2:] != (3, 3):
        raise NotARotation(f"expected (..., 3, 3), got {R.shape}")
    if not np.all(np.isfinite(R)):
        raise NotARotation("non-finite entries")
    ortho = np.abs(np.swapaxes(R, -1, -2) @ R - np.eye(3)).max(axis=(-2, -1))
    det = np.linalg.det(R)
    bad = (ortho > tol) | (np.abs(det - 1.0) > tol)
    if np.any(bad):
        raise NotARotation(
            f"{int(np.sum(bad))} matrix(es) violate R^T R = I, det R = 1 "
            f"beyond {tol:g} (worst orthogonality error {ortho.max():.3g}, "
            f"det {np.ravel(det)[np.argmax(np.ravel(bad))]:.6g})")
    return R


def log_so3(R, check=True):
    """Axis-angle vector with angle in [0, pi] for a rotation matrix.

    Away from pi the skew part gives the axis directly; once the angle is
    past ~3pi/4 the axis is read from the symmetric part instead, using the
    column with the largest diagonal pivot and the skew part only for sign.
    """
    R = check_rotation(R) if check else np.asarray(R, dtype=float)
    w = vee(R - np.swapaxes(R, -1, -2)) / 2.0
    s = np.linalg.norm(w, axis=-1)
    c = np.clip((np.trace(R, axis1=-2, axis2=-1) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arctan2(s, c)

    t2 = theta * theta
    scale = np.where(theta < SMALL_ANGLE, 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0,
                     theta / _safe(s, 1e-300))
    r_general = scale[..., None] * w

    sym = (R + np.swapaxes(R, -1, -2)) / 2.0
    denom = np.where(c < 0.5, 1.0 - c, 1.0)
    nn = (sym - c[..., None, None] * np.eye(3)) / denom[..., None, None]
    diag = np.clip(np.diagonal(nn, axis1=-2, axis2=-1), 0.0, None)
    k = np.argmax(diag, axis=-1)
    col = np.take_along_axis(nn, k[..., None, None], axis=-1)[..., 0]
    pivot = np.take_along_axis(diag, k[..., None], axis=-1)
    axis = col / np.sqrt(np.where(pivot > 0, pivot, 1.0))
    norm = np.linalg.norm(axis, axis=-1, keepdims=True)
    axis = axis / np.where(norm > 0, norm, 1.0)
    flip = np.sum(axis * w, axis=-1) < 0
    axis = np.where(flip[..., None], -axis, axis)
    r_pi = theta[..., None] * axis

    near_pi = (c < -0.7)[..., None]
    return np.where(near_pi, r_pi, r_general)


def canonical_axis_angle(r):
    """Same rotation with angle folded into [0, pi]."""
    r = np.asarray(r, dtype=float)
    fold = _angle(r) > np.pi
    if not np.any(fold):
        return r
    return np.where(fold[..., None], log_so3(exp_so3(r), check=False), r)


def right_jacobian(r):
    r = np.asarray(r, dtype=float)
    theta = _angle(r)[..., None, None]
    K = skew(r)
    return np.eye(3) - _cosc(theta) * K + _sinc3(theta) * (K @ K)


def left_jacobian(r):
    return right_jacobian(-np.asarray(r, dtype=float))


def right_jacobian_inv(r):
    r = np.asarray(r, dtype=float)
    theta = _angle(r)[..., None, None]
    K = skew(r)
    return np.eye(3) + 0.5 * K + _inv_coeff(theta) * (K @ K)


def left_jacobian_inv(r):
    return right_jacobian_inv(-np.asarray(r, dtype=float))


def rotation_angle(R):
    """Angle in [0, pi] of a rotation matrix."""
    R = np.asarray(R, dtype=float)
    s = np.linalg.norm(vee(R - np.swapaxes(R, -1, -2)) / 2.0, axis=-1)
    c = np.clip((np.trace(R, axis1=-2, axis2=-1) - 1.0) / 2.0, -1.0, 1.0)
    return np.arctan2(s, c)


def angle_between(R1, R2):
    return rotation_angle(np.swapaxes(np.asarray(R1, dtype=float), -1, -2) @ R2)


# -- quaternions ---------------------------------------------------------------

def canonical_quat(q):
    """Unit quaternion on the w >= 0 hemisphere.

    For w == 0 the first nonzero component is made positive.
    """
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    nonzero = q != 0
    first = np.argmax(nonzero, axis=-1)
    lead = np.take_along_axis(q, first[..., None], axis=-1)[..., 0]
    return np.where((lead < 0)[..., None], -q, q)


def axis_angle_to_quat(r):
    r = np.asarray(r, dtype=float)
    theta = _angle(r)
    half = theta / 2.0
    th = _safe(theta, SMALL_ANGLE)
    t2 = theta * theta
    k = np.where(theta < SMALL_ANGLE, 0.5 - t2 / 48.0 + t2 * t2 / 3840.0,
                 np.sin(th / 2.0) / th)
    q = np.concatenate([np.cos(half)[..., None], k[..., None] * r], axis=-1)
    return canonical_quat(q)


def quat_to_axis_angle(q):
    q = canonical_quat(q)
    w = q[..., 0]
    v = q[..., 1:]
    s = np.linalg.norm(v, axis=-1)
    theta = 2.0 * np.arctan2(s, w)
    # theta / s near s = 0 (w ~ 1 there)
    x2 = (s / np.where(w > 0, w, 1.0)) ** 2
    small = (s < 1e-6) & (w > 0)
    scale = np.where(small, 2.0 / np.where(w > 0, w, 1.0) * (1.0 - x2 / 3.0),
                     theta / _safe(s, 1e-300))
    scale = np.where(s == 0, 2.0, scale)
    return scale[..., None] * v


def quat_to_matrix(q):
    q = np.asarray(q, dtype=float)
    n2 = np.sum(q * q, axis=-1)
    w, x, y, z = (q[..., i] for i in range(4))
    s = 2.0 / n2
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1.0 - s * (y * y + z * z)
    R[..., 0, 1] = s * (x * y - w * z)
    R[..., 0, 2] = s * (x * z + w * y)
    R[..., 1, 0] = s * (x * y + w * z)
    R[..., 1, 1] = 1.0 - s * (x * x + z * z)
    R[..., 1, 2] = s * (y * z - w * x)
    R[..., 2, 0] = s * (x * z - w * y)
    R[..., 2, 1] = s * (y * z + w * x)
    R[..., 2, 2] = 1.0 - s * (x * x + y * y)
    return R


def matrix_to_quat(R, check=True):
    """Shepperd's method: pick the largest of w, x, y, z as the pivot."""
    R = check_rotation(R) if check else np.asarray(R, dtype=float)
    m00, m11, m22 = R[..., 0, 0], R[..., 1, 1], R[..., 2, 2]
    tr = m00 + m11 + m22
    cands = np.stack([tr, m00, m11, m22], axis=-1)
    k = np.argmax(cands, axis=-1)

    def build(w, x, y, z):
        return np.stack([w, x, y, z], axis=-1)

    d21 = R[..., 2, 1] - R[..., 1, 2]
    d02 = R[..., 0, 2] - R[..., 2, 0]
    d10 = R[..., 1, 0] - R[..., 0, 1]
    s01 = R[..., 0, 1] + R[..., 1, 0]
    s02 = R[..., 0, 2] + R[..., 2, 0]
    s12 = R[..., 1, 2] + R[..., 2, 1]

    with np.errstate(invalid="ignore", divide="ignore"):
        a0 = np.sqrt(np.maximum(1.0 + tr, 0.0))
        a1 = np.sqrt(np.maximum(1.0 + m00 - m11 - m22, 0.0))
        a2 = np.sqrt(np.maximum(1.0 - m00 + m11 - m22, 0.0))
        a3 = np.sqrt(np.maximum(1.0 - m00 - m11 + m22, 0.0))
        q0 = build(a0, d21 / a0, d02 / a0, d10 / a0)
        q1 = build(d21 / a1, a1, s01 / a1, s02 / a1)
        q2 = build(d02 / a2, s01 / a2, a2, s12 / a2)
        q3 = build(d10 / a3, s02 / a3, s12 / a3, a3)
    q = np.select([(k == i)[..., None] for i in range(4)], [q0, q1, q2, q3])
    return canonical_quat(q)


# -- Euler Z-Y'-X'' --------------------------------------------------------------

def euler_to_matrix(ypr):
    ypr = np.asarray(ypr, dtype=float)
    cy, sy = np.cos(ypr[..., 0]), np.sin(ypr[..., 0])
    cp, sp = np.cos(ypr[..., 1]), np.sin(ypr[..., 1])
    cr, sr = np.cos(ypr[..., 2]), np.sin(ypr[..., 2])
    R = np.empty(ypr.shape[:-1] + (3, 3))
    R[..., 0, 0] = cy * cp
    R[..., 0, 1] = cy * sp * sr - sy * cr
    R[..., 0, 2] = cy * sp * cr + sy * sr
    R[..., 1, 0] = sy * cp
    R[..., 1, 1] = sy * sp * sr + cy * cr
    R[..., 1, 2] = sy * sp * cr - cy * sr
    R[..., 2, 0] = -sp
    R[..., 2, 1] = cp * sr
    R[..., 2, 2] = cp * cr
    return R


def is_gimbal_locked(pitch):
    return np.abs(pitch) > np.pi / 2 - GIMBAL_MARGIN


def matrix_to_euler(R, check=True, warn=True):
    """(yaw, pitch, roll) with pitch in [-pi/2, pi/2].

    At gimbal lock roll is set to 0 and the whole in-plane angle goes to
    yaw; a ``GimbalLockWarning`` is issued unless ``warn`` is false.
    """
    R = check_rotation(R) if check else np.asarray(R, dtype=float)
    pitch = np.arctan2(-R[..., 2, 0], np.hypot(R[..., 0, 0], R[..., 1, 0]))
    locked = is_gimbal_locked(pitch)
    yaw = np.where(locked, np.arctan2(-R[..., 0, 1], R[..., 1, 1]),
                   np.arctan2(R[..., 1, 0], R[..., 0, 0]))
    roll = np.where(locked, 0.0, np.arctan2(R[..., 2, 1], R[..., 2, 2]))
    if warn and np.any(locked):
        warnings.warn(f"gimbal lock in {int(np.sum(locked))} rotation(s)",
                      GimbalLockWarning, stacklevel=2)
    return np.stack([yaw, pitch, roll], axis=-1)


def convert(x, source, target):
    """Convert between rotation representations.

    ``source`` and ``target`` are among ``REPRESENTATIONS``. The result is
    always canonical: axis-angle in the [0, pi] ball, quaternion with
    w >= 0, Euler pitch in [-pi/2, pi/2].
    """
    for tag in (source, target):
        if tag not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {tag!r}; "
                             f"expected one of {REPRESENTATIONS}")
    x = np.asarray(x, dtype=float)
    if source == "axisangle" and target == "quat":
        return axis_angle_to_quat(canonical_axis_angle(x))
    if source == "quat" and target == "axisangle":
        return quat_to_axis_angle(x)
    if source == "quat" and target == "quat":
        return canonical_quat(x)

    if source == "axisangle":
        R = exp_so3(x)
    elif source == "quat":
        R = quat_to_matrix(x)
    elif source == "euler":
        R = euler_to_matrix(x)
    else:
        R = check_rotation(x)

    if target == "matrix":
        return R
    if target == "axisangle":
        return log_so3(R, check=False)
    if target == "quat":
        return matrix_to_quat(R, check=False)
    return matrix_to_euler(R, check=False)
