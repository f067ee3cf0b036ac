"""Comparison losses: beta-weighted quaternion + translation L2, and anchor
points regressed independently with L2.

A quaternion/translation pose is a ``(..., 7)`` array ``(qw, qx, qy, qz, tx,
ty, tz)``. Anchor points are ``(..., 3, 3)`` arrays, one point per row.
"""

import numpy as np

from . import poses
from . import rotations as so3
from .exceptions import CollinearAnchors, DegenerateQuat, ReflectionDetected

DEFAULT_BETA = 500.0
BETA_INDOOR = (120.0, 750.0)
BETA_OUTDOOR = (250.0, 2000.0)

QUAT_FLOOR = 1e-9
COLLINEAR_TOL = 1e-9
REFLECTION_TOL = 1e-9

DEFAULT_REFS = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def pose_to_qt(p):
    p = poses.as_pose(p)
    return np.concatenate([so3.convert(p[..., :3], "axisangle", "quat"), p[..., 3:]],
                          axis=-1)


def qt_to_pose(qt):
    qt = np.asarray(qt, dtype=float)
    return np.concatenate([so3.convert(qt[..., :4], "quat", "axisangle"), qt[..., 4:]],
                          axis=-1)


def posenet_loss(truth, pred, beta=DEFAULT_BETA):
    """``|t_pred - t_true|^2 + beta |q_pred/|q_pred| - q_true|^2``.

    ``truth`` is a canonical quaternion/translation pose, ``pred`` the raw
    network output whose quaternion need not be normalised. The truth
    quaternion is flipped onto the hemisphere of the prediction first.
    Returns ``(loss, grad)`` with ``grad`` the derivative in the 7 raw
    prediction coordinates.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    truth = np.asarray(truth, dtype=float)
    pred = np.asarray(pred, dtype=float)
    q_raw = pred[..., :4]
    norm = np.linalg.norm(q_raw, axis=-1, keepdims=True)
    if np.any(norm < QUAT_FLOOR):
        raise DegenerateQuat(f"predicted quaternion norm below {QUAT_FLOOR:g}")
    q_hat = q_raw / norm
    q_true = truth[..., :4]
    same_side = np.sum(q_hat * q_true, axis=-1, keepdims=True) >= 0
    q_true = np.where(same_side, q_true, -q_true)

    dq = q_hat - q_true
    dt = pred[..., 4:] - truth[..., 4:]
    loss = np.sum(dt * dt, axis=-1) + beta * np.sum(dq * dq, axis=-1)

    # d q_hat / d q_raw = (I - q_hat q_hat^T) / |q_raw|
    g_hat = 2.0 * beta * dq
    g_q = (g_hat - q_hat * np.sum(q_hat * g_hat, axis=-1, keepdims=True)) / norm
    return loss, np.concatenate([g_q, 2.0 * dt], axis=-1)


def reference_points(extent=1.0):
    return DEFAULT_REFS * float(extent)


def _collinear(points):
    cross = np.cross(points[..., 1, :] - points[..., 0, :],
                     points[..., 2, :] - points[..., 0, :])
    return np.linalg.norm(cross, axis=-1) < COLLINEAR_TOL


def pose_to_anchors(p, refs=None):
    refs = DEFAULT_REFS if refs is None else np.asarray(refs, dtype=float)
    if np.any(_collinear(refs)):
        raise CollinearAnchors("reference points are collinear")
    p = poses.as_pose(p)
    R = poses.rotation(p)
    return np.einsum("...ij,kj->...ki", R, refs) + p[..., None, 3:]


def anchors_to_pose(anchors, refs=None):
    """Rigid transform taking ``refs`` onto ``anchors`` in the least-squares
    sense (orthogonal Procrustes with the determinant forced to +1)."""
    refs = DEFAULT_REFS if refs is None else np.asarray(refs, dtype=float)
    a = np.asarray(anchors, dtype=float)
    if np.any(_collinear(refs)):
        raise CollinearAnchors("reference points are collinear")
    if np.any(_collinear(a)):
        raise CollinearAnchors("anchor points are collinear")
    c_ref = refs.mean(axis=-2)
    c_a = a.mean(axis=-2)
    H = np.einsum("ki,...kj->...ij", refs - c_ref, a - c_a[..., None, :])
    U, S, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(np.swapaxes(Vt, -1, -2) @ np.swapaxes(U, -1, -2)))
    # with three points H has rank 2 and the sign choice is free
    if np.any((d < 0) & (S[..., 2] > REFLECTION_TOL * S[..., 0])):
        raise ReflectionDetected("best orthogonal fit is a reflection")
    D = np.zeros(d.shape + (3, 3))
    D[..., 0, 0] = 1.0
    D[..., 1, 1] = 1.0
    D[..., 2, 2] = np.where(d < 0, -1.0, 1.0)
    R = np.swapaxes(Vt, -1, -2) @ D @ np.swapaxes(U, -1, -2)
    t = c_a - np.einsum("...ij,j->...i", R, c_ref)
    return np.concatenate([so3.log_so3(R, check=False), t], axis=-1)


def anchor_loss(truth, pred):
    """Sum of squared anchor displacements; gradient is ``2 (pred - truth)``
    flattened to 9 components."""
    truth = np.asarray(truth, dtype=float)
    pred = np.asarray(pred, dtype=float)
    diff = pred - truth
    loss = np.sum(diff * diff, axis=(-2, -1))
    return loss, 2.0 * diff.reshape(diff.shape[:-2] + (9,))
