"""SE(3) in the 6-vector chart ``(rx, ry, rz, tx, ty, tz)``.

The rotation block is an axis-angle vector and the translation is applied
after it, so a chart vector ``p`` stands for the homogeneous matrix
``[[exp(r), t], [0, 1]]``. All functions broadcast over leading axes.

With this chart the canonical left-invariant metric has the chart itself as
its logarithm at the identity; logarithms at any other base point are
obtained by left translation.
"""

from dataclasses import dataclass

import numpy as np

from . import rotations as so3
from .exceptions import CutLocus, NotARotation

IDENTITY = np.zeros(6)
CUT_LOCUS_MARGIN = 1e-6


@dataclass(frozen=True)
class Tangent:
    """Tangent vector ``vector`` (chart coordinates) at pose ``base``."""

    vector: np.ndarray
    base: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vector, dtype=dtype)


def as_pose(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (6,):
        raise ValueError(f"pose must have trailing dimension 6, got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("pose has non-finite components")
    return p


def rotation(p):
    return so3.exp_so3(np.asarray(p)[..., :3])


def compose(p1, p2):
    p1, p2 = as_pose(p1), as_pose(p2)
    R1 = so3.exp_so3(p1[..., :3])
    R = R1 @ so3.exp_so3(p2[..., :3])
    t = np.einsum("...ij,...j->...i", R1, p2[..., 3:]) + p1[..., 3:]
    return np.concatenate([so3.log_so3(R, check=False), t], axis=-1)


def inverse(p):
    p = as_pose(p)
    r = so3.canonical_axis_angle(p[..., :3])
    R = so3.exp_so3(r)
    t = -np.einsum("...ji,...j->...i", R, p[..., 3:])
    return np.concatenate([-r, t], axis=-1)


def to_matrix(p):
    p = as_pose(p)
    X = np.zeros(p.shape[:-1] + (4, 4))
    X[..., :3, :3] = so3.exp_so3(p[..., :3])
    X[..., :3, 3] = p[..., 3:]
    X[..., 3, 3] = 1.0
    return X


def from_matrix(X):
    X = np.asarray(X, dtype=float)
    if X.shape[-2:] != (4, 4):
        raise NotARotation(f"expected (..., 4, 4), got {X.shape}")
    if not np.all(X[..., 3, :] == np.array([0.0, 0.0, 0.0, 1.0])):
        raise NotARotation("homogeneous matrix bottom row must be (0, 0, 0, 1)")
    r = so3.log_so3(X[..., :3, :3])
    return np.concatenate([r, X[..., :3, 3]], axis=-1)


def log_identity(p):
    """Riemannian logarithm at the identity: the chart value itself."""
    p = as_pose(p)
    r = so3.canonical_axis_angle(p[..., :3])
    v = np.concatenate([r, p[..., 3:]], axis=-1)
    return Tangent(v, np.broadcast_to(IDENTITY, v.shape))


def exp_identity(v):
    if isinstance(v, Tangent):
        if np.any(v.base != 0.0):
            raise ValueError("exp_identity needs a tangent vector at the identity")
        v = v.vector
    v = np.asarray(v, dtype=float)
    return np.concatenate([so3.canonical_axis_angle(v[..., :3]), v[..., 3:]],
                          axis=-1)


def relative_angle(base, p):
    """Rotation angle of inverse(base) o p."""
    base, p = as_pose(base), as_pose(p)
    return so3.angle_between(rotation(base), rotation(p))


def check_cut_locus(base, p, margin=CUT_LOCUS_MARGIN):
    angle = np.atleast_1d(relative_angle(base, p))
    bad = np.flatnonzero(np.ravel(angle) >= np.pi - margin)
    if bad.size:
        raise CutLocus(
            f"relative rotation angle within {margin:g} of pi at "
            f"index(es) {bad[:10].tolist()}; logarithm is not unique", bad)


def left_jacobian(p, at):
    """Chart differential of q -> p o q, evaluated at q = ``at``.

    Block layout ``[[dLr/dr, dLr/dt], [dLt/dr, dLt/dt]]``. The translation of
    p o q is ``R_p t_q + t_p``, so both off-diagonal blocks vanish and
    ``dLt/dt = R_p``. The rotation block follows from
    ``log(R_p exp(r + d)) = log(R_p exp(r)) + Jr^-1(.) Jr(r) d + O(d^2)``.
    """
    p, at = as_pose(p), as_pose(at)
    shape = np.broadcast_shapes(p.shape, at.shape)[:-1]
    Rp = so3.exp_so3(p[..., :3])
    r_out = so3.log_so3(Rp @ so3.exp_so3(at[..., :3]), check=False)
    J = np.zeros(shape + (6, 6))
    J[..., :3, :3] = so3.right_jacobian_inv(r_out) @ so3.right_jacobian(at[..., :3])
    J[..., 3:, 3:] = Rp
    return J


def numeric_left_jacobian(p, at, step=1e-6):
    """Central finite differences of the chart composition, column by column."""
    p, at = as_pose(p), as_pose(at)
    cols = []
    for k in range(6):
        e = np.zeros(6)
        e[k] = step
        cols.append((compose(p, at + e) - compose(p, at - e)) / (2.0 * step))
    return np.stack(cols, axis=-1)


def riemannian_log(base, p):
    """Logarithm of ``p`` at ``base``, as a chart tangent vector at ``base``.

    Computed as ``DL_base . log_identity(inverse(base) o p)``.
    """
    base, p = as_pose(base), as_pose(p)
    check_cut_locus(base, p)
    u = log_identity(compose(inverse(base), p)).vector
    DL = left_jacobian(base, np.zeros_like(base))
    v = np.einsum("...ij,...j->...i", DL, u)
    return Tangent(v, np.broadcast_to(base, v.shape))


def chart_distance(p, q):
    """Euclidean distance between canonical chart vectors."""
    p, q = as_pose(p), as_pose(q)
    a = np.concatenate([so3.canonical_axis_angle(p[..., :3]), p[..., 3:]], axis=-1)
    b = np.concatenate([so3.canonical_axis_angle(q[..., :3]), q[..., 3:]], axis=-1)
    return np.linalg.norm(a - b, axis=-1)


def sample_poses(rng, n, max_angle=np.pi, translation_scale=1.0):
    """Random poses with axis directions uniform on the sphere.

    Angles are uniform on [0, max_angle); translations are Gaussian.
    """
    axis = rng.normal(size=(n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    angle = rng.uniform(0.0, max_angle, size=(n, 1))
    t = rng.normal(scale=translation_scale, size=(n, 3))
    return np.concatenate([axis * angle, t], axis=1)
