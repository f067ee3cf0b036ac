"""Left-invariant geodesic pose loss on SE(3), with baselines and checks."""

from . import adaptive_weights, baselines, metric_loss, poses, rotations
from .adaptive_weights import (AdaptiveMetric, PoseResidualTransformer, compute_weights,
                               residuals, weights_to_metric)
from .baselines import anchor_loss, anchors_to_pose, pose_to_anchors, posenet_loss
from .exceptions import (CollinearAnchors, CutLocus, DegenerateQuat, Diverged, DuplicateId,
                         GimbalLockWarning, NonPositiveWeight, NotARotation, NotSPD,
                         ParseError, ReflectionDetected, SingularCovariance, UnitsMissing,
                         ZeroVariance)
from .metric_loss import (LossGrad, MetricZ, geodesic_grad, geodesic_loss, grad_check,
                          metric_grad)
from .poses import (IDENTITY, Tangent, compose, exp_identity, from_matrix, inverse,
                    left_jacobian, log_identity, riemannian_log, to_matrix)

__version__ = "0.1.0"
