"""Riemannian gradient descent of one pose onto a target."""

from dataclasses import dataclass, field

import numpy as np

from .. import poses
from ..exceptions import CutLocus, Diverged
from ..metric_loss import as_metric, descend, geodesic_grad, geodesic_loss

MAX_HALVINGS = 60


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.4
    max_iter: int = 10000
    threshold: float = 1e-14
    seed: int = 0
    metric: str = "identity"   # "identity", "adaptive", or a metric file path

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be >= 0, got {self.max_iter}")


@dataclass
class AlignResult:
    iterations: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    poses: list = field(default_factory=list)
    converged: bool = False

    @property
    def pose(self):
        return self.poses[-1]

    @property
    def loss(self):
        return self.losses[-1]

    def rows(self):
        return zip(self.iterations, self.losses, self.poses)


def align(init, target, Z=None, cfg=None):
    """Descend ``loss(target, p_hat)`` from ``init``.

    Each step is ``p_hat o exp(-lr * DL_{p_hat^-1} grad)``. A step that does
    not lower the loss halves the learning rate (kept for later steps);
    ``Diverged`` is raised after ``MAX_HALVINGS`` consecutive halvings.
    """
    cfg = TrainConfig() if cfg is None else cfg
    Z = as_metric(Z)
    target = poses.as_pose(target)
    p_hat = poses.as_pose(init).copy()
    poses.check_cut_locus(target, p_hat)

    loss = float(geodesic_loss(target, p_hat, Z))
    out = AlignResult([0], [loss], [p_hat])
    lr = cfg.lr
    for it in range(1, cfg.max_iter + 1):
        if loss < cfg.threshold:
            break
        grad = geodesic_grad(target, p_hat, Z).grad
        for _ in range(MAX_HALVINGS + 1):
            cand = descend(p_hat, grad, lr)
            try:
                new = float(geodesic_loss(target, cand, Z))
            except CutLocus:
                new = np.inf
            if new < loss:
                break
            lr /= 2.0
        else:
            raise Diverged(f"no decrease after {MAX_HALVINGS} step halvings at "
                           f"iteration {it} (loss {loss:.6g})")
        p_hat, loss = cand, new
        out.iterations.append(it)
        out.losses.append(loss)
        out.poses.append(p_hat)
    out.converged = loss < cfg.threshold
    return out
