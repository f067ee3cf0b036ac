"""Per-record and mean pose errors for a set of (truth, prediction) pairs."""

from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .. import poses
from .. import rotations as so3
from ..metric_loss import as_metric, geodesic_loss
from .io import fmt

COLUMNS = ("rx_deg", "ry_deg", "rz_deg", "tx", "ty", "tz", "gd", "gd_sq")


@dataclass
class EvalReport:
    ids: list
    units: str
    cut_locus: np.ndarray   # bool per record
    errors: np.ndarray      # (n, 8) in COLUMNS order; NaN rows at the cut locus
    mean: np.ndarray        # (8,)
    variance: np.ndarray    # (8,), sample variance (ddof=1)
    metric: str = "identity"

    @property
    def n_excluded(self):
        return int(np.sum(self.cut_locus))

    def column(self, name):
        return self.errors[:, COLUMNS.index(name)]

    def summary(self):
        return dict(zip(COLUMNS, self.mean.tolist()))


def _wrap_deg(d):
    return (d + 180.0) % 360.0 - 180.0


def euler_errors_deg(truth, pred):
    """Absolute per-axis Euler differences in degrees, ordered (x, y, z).

    Both rotations are decomposed as intrinsic Z-Y'-X''; x is roll, y pitch,
    z yaw.
    """
    et = so3.matrix_to_euler(poses.rotation(truth), check=False, warn=False)
    ep = so3.matrix_to_euler(poses.rotation(pred), check=False, warn=False)
    d = np.abs(_wrap_deg(np.degrees(ep - et)))
    return d[..., ::-1]


def evaluate(pairs, Z=None, metric_name=None):
    Z = as_metric(Z)
    n = len(pairs)
    errors = np.full((n, len(COLUMNS)), np.nan)
    angle = np.atleast_1d(poses.relative_angle(pairs.truth, pairs.pred)) if n else np.zeros(0)
    cut = angle >= np.pi - poses.CUT_LOCUS_MARGIN
    ok = ~cut
    if np.any(ok):
        t, p = pairs.truth[ok], pairs.pred[ok]
        errors[ok, 0:3] = euler_errors_deg(t, p)
        errors[ok, 3:6] = np.abs(p[:, 3:] - t[:, 3:])
        sq = geodesic_loss(t, p, Z)
        errors[ok, 6] = np.sqrt(sq)
        errors[ok, 7] = sq
    kept = errors[ok]
    mean = kept.mean(axis=0) if len(kept) else np.full(len(COLUMNS), np.nan)
    var = kept.var(axis=0, ddof=1) if len(kept) > 1 else np.full(len(COLUMNS), np.nan)
    if metric_name is None:
        metric_name = "identity" if np.array_equal(Z.matrix, np.eye(6)) else "custom"
    return EvalReport(list(pairs.ids), pairs.units, cut, errors, mean, var, metric_name)


def format_report(report, timestamp=True):
    lines = []
    if timestamp:
        lines.append("# generated " + datetime.now(timezone.utc).isoformat(timespec="seconds"))
    lines.append(f"# units={report.units}, metric={report.metric}, "
                 f"records={len(report.ids)}, excluded_cut_locus={report.n_excluded}")
    lines.append(",".join(("id", "cut_locus") + COLUMNS))
    for rid, cut, row in zip(report.ids, report.cut_locus, report.errors):
        lines.append(",".join([rid, str(int(cut))] + [fmt(x) for x in row]))
    lines.append(",".join(["__mean__", ""] + [fmt(x) for x in report.mean]))
    lines.append(",".join(["__variance__", ""] + [fmt(x) for x in report.variance]))
    return "\n".join(lines) + "\n"


def save_report(report, path, timestamp=True):
    with open(path, "w") as fh:
        fh.write(format_report(report, timestamp))

