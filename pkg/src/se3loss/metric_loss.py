"""Left-invariant geodesic loss on SE(3) and its backward gradient."""

from dataclasses import dataclass

import numpy as np

from . import poses
from . import rotations as so3
from .exceptions import NotSPD
from .poses import Tangent

SYMMETRY_TOL = 1e-12
EIGEN_FLOOR = 1e-12


class MetricZ:
    """Inner product on the tangent space at the identity.

    Stores a read-only 6x6 symmetric positive-definite matrix; validated once
    at construction.
    """

    def __init__(self, matrix):
        Z = np.array(matrix, dtype=float)
        if Z.shape != (6, 6):
            raise NotSPD(f"metric must be 6x6, got {Z.shape}")
        if not np.all(np.isfinite(Z)):
            raise NotSPD("metric has non-finite entries")
        if np.abs(Z - Z.T).max() > SYMMETRY_TOL:
            raise NotSPD("metric is not symmetric")
        try:
            np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            raise NotSPD("metric is not positive definite") from None
        lo = np.linalg.eigvalsh(Z).min()
        if lo <= EIGEN_FLOOR:
            raise NotSPD(f"metric smallest eigenvalue {lo:.3g} <= {EIGEN_FLOOR:g}")
        Z.setflags(write=False)
        self._matrix = Z

    @classmethod
    def identity(cls):
        return cls(np.eye(6))

    @classmethod
    def from_weights(cls, weights):
        w = np.asarray(weights, dtype=float)
        if w.shape != (6,):
            raise NotSPD(f"expected 6 weights, got shape {w.shape}")
        return cls(np.diag(w))

    @property
    def matrix(self):
        return self._matrix

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __eq__(self, other):
        return isinstance(other, MetricZ) and np.array_equal(self._matrix, other._matrix)

    def __repr__(self):
        if np.count_nonzero(self._matrix - np.diag(np.diag(self._matrix))) == 0:
            return f"MetricZ.from_weights({np.diag(self._matrix).tolist()})"
        return f"MetricZ({self._matrix.tolist()})"


def as_metric(Z):
    if Z is None:
        return MetricZ.identity()
    if isinstance(Z, MetricZ):
        return Z
    return MetricZ(Z)


@dataclass(frozen=True)
class LossGrad:
    loss: np.ndarray
    grad: Tangent


def transport_jacobian(p_hat):
    """Differential of left translation by inverse(p_hat), taken at p_hat."""
    p_hat = poses.as_pose(p_hat)
    return poses.left_jacobian(poses.inverse(p_hat), p_hat)


def _right_translation_jacobian(u):
    # d/de chart(e o q) at e = 0, for q with chart value u
    shape = u.shape[:-1]
    M = np.zeros(shape + (6, 6))
    M[..., :3, :3] = so3.left_jacobian_inv(u[..., :3])
    M[..., 3:, :3] = -so3.skew(u[..., 3:])
    M[..., 3:, 3:] = np.eye(3)
    return M


def _mv(A, x):
    return np.einsum("...ij,...j->...i", A, x)


def _pieces(p, p_hat, Z):
    Z = as_metric(Z).matrix
    v = poses.riemannian_log(p_hat, p).vector
    J = transport_jacobian(p_hat)
    u = _mv(J, v)
    return Z, v, J, u


def geodesic_loss(p, p_hat, Z=None):
    """Squared geodesic distance ``v^T J^T Z J v`` between truth and prediction.

    ``v`` is the logarithm of ``p`` at ``p_hat`` and ``J`` transports it back
    to the identity, where ``Z`` is the inner product.
    """
    Z, v, J, u = _pieces(p, p_hat, Z)
    return np.einsum("...i,ij,...j->...", u, Z, u)


def geodesic_grad(p, p_hat, Z=None):
    """Loss and its derivative with respect to the chart coordinates of p_hat.

    The gradient is ``-2 J^T M^T Z J v`` where ``M`` is the chart Jacobian
    of right-composition at ``q = inverse(p_hat) o p``. When the rotation and
    translation blocks of ``Z`` are each multiples of the identity (so in
    particular for ``Z = I``), ``M^T Z J v = Z J v`` and this reduces to
    ``metric_grad``; for other metrics only this form is the true derivative.
    """
    p_hat = poses.as_pose(p_hat)
    Z, v, J, u = _pieces(p, p_hat, Z)
    Zu = _mv(Z, u)
    loss = np.einsum("...i,...i->...", u, Zu)
    M = _right_translation_jacobian(u)
    g = -2.0 * _mv(np.swapaxes(J, -1, -2), _mv(np.swapaxes(M, -1, -2), Zu))
    return LossGrad(loss, Tangent(g, np.broadcast_to(p_hat, g.shape)))


def metric_grad(p, p_hat, Z=None):
    """``-2 J^T Z J v``: the metric-weighted logarithm, as a chart vector at p_hat.

    This is the Riemannian gradient of the squared distance of a true
    left-invariant Riemannian metric, lowered to chart coordinates. It agrees
    with ``geodesic_grad`` for block-isotropic ``Z``.
    """
    p_hat = poses.as_pose(p_hat)
    Z, v, J, u = _pieces(p, p_hat, Z)
    g = -2.0 * _mv(np.swapaxes(J, -1, -2), _mv(Z, u))
    return Tangent(g, np.broadcast_to(p_hat, g.shape))


def descend(p_hat, grad, lr):
    """One right-multiplicative step ``p_hat o exp(-lr * DL_{p_hat^-1} grad)``."""
    p_hat = poses.as_pose(p_hat)
    g = np.asarray(grad.vector if isinstance(grad, Tangent) else grad, dtype=float)
    step = -lr * _mv(transport_jacobian(p_hat), g)
    return poses.compose(p_hat, poses.exp_identity(step))


@dataclass(frozen=True)
class GradCheck:
    analytic: np.ndarray
    numeric: np.ndarray
    deviation: np.ndarray
    max_abs: float
    max_rel: float
    step: float

    def passed(self, rtol=1e-4):
        return bool(self.max_rel < rtol)


def relative_error(analytic, numeric, floor=1e-12):
    """Per-sample ``|a - n|_inf / max(|a|_inf, |n|_inf, floor)``."""
    dev = np.abs(analytic - numeric).max(axis=-1)
    scale = np.maximum(np.abs(analytic).max(axis=-1), np.abs(numeric).max(axis=-1))
    return dev / np.maximum(scale, floor)


def numeric_grad(p, p_hat, Z=None, step=1e-6):
    p_hat = poses.as_pose(p_hat)
    Z = as_metric(Z)
    cols = []
    for k in range(6):
        e = np.zeros(6)
        e[k] = step
        hi = geodesic_loss(p, p_hat + e, Z)
        lo = geodesic_loss(p, p_hat - e, Z)
        cols.append((hi - lo) / (2.0 * step))
    return np.stack(cols, axis=-1)


def grad_check(p, p_hat, Z=None, step=1e-6):
    """Compare the analytic gradient with central differences in p_hat."""
    if not 1e-8 < step < 1e-3:
        raise ValueError(f"step must lie in (1e-8, 1e-3), got {step:g}")
    Z = as_metric(Z)
    analytic = geodesic_grad(p, p_hat, Z).grad.vector
    numeric = numeric_grad(p, p_hat, Z, step)
    deviation = np.abs(analytic - numeric)
    rel = relative_error(analytic, numeric)
    return GradCheck(analytic, numeric, deviation, float(deviation.max()),
                     float(np.max(rel)), step)
