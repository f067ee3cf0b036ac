"""Data-adaptive diagonal metric from prediction residuals.

Residuals are the identity-chart logarithms of ``inverse(truth) o pred``;
the weight of each coordinate is the matching diagonal entry of the
inverse residual covariance.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from . import poses
from .exceptions import CutLocus, NonPositiveWeight, SingularCovariance
from .metric_loss import MetricZ

MIN_SAMPLES = 7
MAX_CONDITION = 1e12

# diag(cov^-1) reported for the King's College residuals; scale reference only.
KINGS_COLLEGE_WEIGHTS = (0.147, 0.954, 0.261, 0.001, 0.003, 0.002)


def residuals(truth, pred):
    """``log_identity(inverse(truth_i) o pred_i)`` for every pair, shape (n, 6)."""
    truth = np.atleast_2d(poses.as_pose(truth))
    pred = np.atleast_2d(poses.as_pose(pred))
    try:
        poses.check_cut_locus(truth, pred)
    except CutLocus as exc:
        raise CutLocus(f"pair(s) {exc.indices[:10]}: relative rotation at the "
                       "cut locus", exc.indices) from None
    return poses.log_identity(poses.compose(poses.inverse(truth), pred)).vector


def residual_covariance(X, center=True):
    """Sample covariance with divisor n-1 when centred; otherwise the raw
    second moment ``X^T X / n``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 6:
        raise ValueError(f"residuals must have shape (n, 6), got {X.shape}")
    n = X.shape[0]
    if n < MIN_SAMPLES:
        raise SingularCovariance(
            f"need at least {MIN_SAMPLES} residuals for a 6x6 covariance, got {n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("residuals contain non-finite values")
    if center:
        Xc = X - X.mean(axis=0)
        return Xc.T @ Xc / (n - 1)
    return X.T @ X / n


def compute_weights(X, center=True):
    """``diag(cov(X)^-1)`` from the full inverse, not ``1 / diag(cov)``."""
    C = residual_covariance(X, center)
    cond = np.linalg.cond(C)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise SingularCovariance(
            f"residual covariance is singular or ill-conditioned (cond {cond:.3g})")
    try:
        L = np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        raise SingularCovariance("residual covariance is not positive definite") from None
    Linv = np.linalg.solve(L, np.eye(6))
    # diag(C^-1) = column sums of squares of L^-1
    return np.sum(Linv * Linv, axis=0)


def weights_to_metric(w):
    w = np.asarray(w, dtype=float)
    if w.shape != (6,):
        raise ValueError(f"expected 6 weights, got shape {w.shape}")
    if not np.all(w > 0):
        raise NonPositiveWeight(f"weights must be positive, got {w.tolist()}")
    return MetricZ.from_weights(w)


class PoseResidualTransformer(TransformerMixin, BaseEstimator):
    """Map stacked ``[truth | pred]`` rows of width 12 to residual logs.

    Stateless; ``fit`` only records the input width.
    """

    def fit(self, X, y=None):
        validate_data(self, X, reset=True)
        if self.n_features_in_ != 12:
            raise ValueError(f"expected 12 columns (truth, pred), got {self.n_features_in_}")
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        return residuals(X[:, :6], X[:, 6:])


class AdaptiveMetric(TransformerMixin, BaseEstimator):
    """Fit a diagonal metric to residual logs.

    Parameters
    ----------
    center : bool, default=True
        Subtract the residual mean before forming the covariance.

    Attributes
    ----------
    covariance_ : ndarray of shape (6, 6)
    weights_ : ndarray of shape (6,)
    metric_ : MetricZ
    """

    def __init__(self, center=True):
        self.center = center

    def fit(self, X, y=None):
        X = validate_data(self, X, ensure_min_samples=MIN_SAMPLES)
        self.covariance_ = residual_covariance(X, self.center)
        self.weights_ = compute_weights(X, self.center)
        self.metric_ = weights_to_metric(self.weights_)
        return self

    def transform(self, X):
        """Scale residuals so that their squared norm is the weighted loss."""
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        return X * np.sqrt(self.weights_)

    def score(self, X, y=None):
        """Negative mean weighted squared residual."""
        Xw = self.transform(check_array(X))
        return -float(np.mean(np.sum(Xw * Xw, axis=1)))
