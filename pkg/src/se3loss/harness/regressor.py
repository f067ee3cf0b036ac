"""One-hidden-layer pose regressor trained under a choice of pose loss.

The network is a plain tanh MLP with hand-written backpropagation and Adam;
the tested part is the loss/gradient contract at its output layer.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .. import baselines, poses
from ..adaptive_weights import AdaptiveMetric, residuals
from ..exceptions import Diverged
from ..metric_loss import as_metric, geodesic_grad, geodesic_loss
from .align import TrainConfig

LOSS_KINDS = ("geodesic", "posenet", "anchors")
OUTPUT_DIM = {"geodesic": 6, "posenet": 7, "anchors": 9}


def mean_geodesic_distance(truth, pred, Z=None):
    return float(np.mean(np.sqrt(geodesic_loss(truth, pred, Z))))


class PoseRegressor(RegressorMixin, BaseEstimator):
    """MLP mapping feature vectors to poses.

    Parameters
    ----------
    loss : {"geodesic", "posenet", "anchors"}
        Output parameterisation and training loss: 6-vector chart with the
        geodesic loss, quaternion + translation with the beta-weighted L2,
        or three anchor points with plain L2.
    hidden : int
    lr : float
        Adam step size.
    n_steps : int
        Full-batch training steps.
    beta : float
        Rotation weight of the quaternion loss.
    metric : array-like of shape (6, 6) or MetricZ, optional
        Inner product of the geodesic loss; identity when omitted.
    schedule : {"cosine", "constant"}
        Step-size schedule over the training run.
    random_state : int
    """

    def __init__(self, loss="geodesic", hidden=64, lr=1e-2, n_steps=5000,
                 beta=baselines.DEFAULT_BETA, metric=None, schedule="cosine",
                 random_state=0):
        self.loss = loss
        self.hidden = hidden
        self.lr = lr
        self.n_steps = n_steps
        self.beta = beta
        self.metric = metric
        self.schedule = schedule
        self.random_state = random_state

    def _targets(self, y):
        if self.loss == "geodesic":
            return y
        if self.loss == "posenet":
            return baselines.pose_to_qt(y)
        return baselines.pose_to_anchors(y)

    def _bias(self):
        if self.loss == "geodesic":
            return np.zeros(6)
        if self.loss == "posenet":
            return np.array([1.0, 0, 0, 0, 0, 0, 0])
        return baselines.reference_points().ravel()

    def _loss_grad(self, out, target):
        n = len(out)
        if self.loss == "geodesic":
            lg = geodesic_grad(target, out, self._Z)
            return lg.loss, lg.grad.vector / n
        if self.loss == "posenet":
            loss, g = baselines.posenet_loss(target, out, self.beta)
            return loss, g / n
        loss, g = baselines.anchor_loss(target, out.reshape(-1, 3, 3))
        return loss, g / n

    def _forward(self, X):
        H = np.tanh(X @ self.W1_ + self.b1_)
        return H, H @ self.W2_ + self.b2_

    def _decode(self, out):
        if self.loss == "geodesic":
            return poses.exp_identity(out)
        if self.loss == "posenet":
            return baselines.qt_to_pose(out)
        return baselines.anchors_to_pose(out.reshape(-1, 3, 3))

    def fit(self, X, y, callback=None):
        if self.loss not in LOSS_KINDS:
            raise ValueError(f"loss must be one of {LOSS_KINDS}, got {self.loss!r}")
        X, y = validate_data(self, X, y, multi_output=True, y_numeric=True)
        y = poses.as_pose(y)
        self._Z = as_metric(self.metric)
        rng = np.random.default_rng(self.random_state)
        d, h, k = X.shape[1], self.hidden, OUTPUT_DIM[self.loss]
        self.W1_ = rng.normal(scale=np.sqrt(1.0 / d), size=(d, h))
        self.b1_ = np.zeros(h)
        self.W2_ = rng.normal(scale=0.01 * np.sqrt(1.0 / h), size=(h, k))
        self.b2_ = self._bias()
        params = [self.W1_, self.b1_, self.W2_, self.b2_]
        m = [np.zeros_like(p) for p in params]
        v = [np.zeros_like(p) for p in params]
        b1, b2, eps = 0.9, 0.999, 1e-8

        target = self._targets(y)
        self.loss_curve_ = []
        for step in range(1, self.n_steps + 1):
            H, out = self._forward(X)
            with np.errstate(over="ignore"):
                blown = not np.isfinite(np.sum(out * out))
            if blown:
                raise Diverged(f"non-finite network output at step {step}")
            loss, d_out = self._loss_grad(out, target)
            mean_loss = float(np.mean(loss))
            if not np.isfinite(mean_loss):
                raise Diverged(f"non-finite training loss at step {step}")
            self.loss_curve_.append(mean_loss)
            dA = (d_out @ self.W2_.T) * (1.0 - H * H)
            grads = [X.T @ dA, dA.sum(axis=0), H.T @ d_out, d_out.sum(axis=0)]
            lr = self.lr
            if self.schedule == "cosine":
                lr *= 0.5 * (1.0 + np.cos(np.pi * (step - 1) / self.n_steps))
            for i, (p, g) in enumerate(zip(params, grads)):
                m[i] = b1 * m[i] + (1 - b1) * g
                v[i] = b2 * v[i] + (1 - b2) * g * g
                mh = m[i] / (1 - b1 ** step)
                vh = v[i] / (1 - b2 ** step)
                p -= lr * mh / (np.sqrt(vh) + eps)
            if callback is not None:
                callback(self, step)
        return self

    def predict(self, X):
        check_is_fitted(self, "W1_")
        X = validate_data(self, X, reset=False)
        return self._decode(self._forward(X)[1])

    def score(self, X, y):
        """Negative mean geodesic distance under the identity metric."""
        return -mean_geodesic_distance(poses.as_pose(y), self.predict(X))


@dataclass
class DemoResult:
    loss_kind: str
    initial_gd: float
    final_gd: float
    loss_curve: list
    weights: np.ndarray = None

    @property
    def reduction(self):
        return self.initial_gd / self.final_gd


def synthetic_poses(seed, n_train=512, n_val=128, noise=0.05, max_angle=np.pi / 2):
    """Inputs are pose charts plus Gaussian noise; targets are the poses."""
    rng = np.random.default_rng(seed)
    y = poses.sample_poses(rng, n_train + n_val, max_angle=max_angle)
    X = y + rng.normal(scale=noise, size=y.shape)
    return X[:n_train], y[:n_train], X[n_train:], y[n_train:]


def train_demo(loss_kind="geodesic", cfg=None, noise=0.05, n_train=512, n_val=128,
               metric=None):
    """Train on a synthetic task and report mean validation G.D. (Z = I).

    ``cfg.max_iter`` is the number of training steps and ``cfg.lr`` the Adam
    step size. With ``cfg.metric == "adaptive"`` (geodesic loss only) a
    first pass under Z = I produces validation residuals whose weights
    define the metric for a second training pass.
    """
    cfg = TrainConfig(lr=1e-2, max_iter=5000, seed=42) if cfg is None else cfg
    X, y, Xv, yv = synthetic_poses(cfg.seed, n_train, n_val, noise)

    def run(Z):
        model = PoseRegressor(loss=loss_kind, lr=cfg.lr, n_steps=cfg.max_iter,
                              metric=Z, random_state=cfg.seed)
        init = PoseRegressor(loss=loss_kind, n_steps=0, random_state=cfg.seed)
        initial = mean_geodesic_distance(yv, init.fit(X, y).predict(Xv))
        model.fit(X, y)
        return model, initial

    weights = None
    if cfg.metric == "adaptive":
        if loss_kind != "geodesic":
            raise ValueError("adaptive metric applies to the geodesic loss only")
        first, _ = run(None)
        est = AdaptiveMetric().fit(residuals(yv, first.predict(Xv)))
        weights = est.weights_
        metric = est.metric_
    model, initial = run(metric)
    final = mean_geodesic_distance(yv, model.predict(Xv))
    return DemoResult(loss_kind, initial, final, model.loss_curve_, weights)
