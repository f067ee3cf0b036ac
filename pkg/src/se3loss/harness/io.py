"""Plain-text file formats.

Pose pair file::

    # units=m, order=axisangle-translation
    id, rx, ry, rz, tx, ty, tz, rx, ry, rz, tx, ty, tz

Each data row carries the ground-truth pose followed by the prediction.
Further ``#`` lines and blank lines are ignored. Numbers are written with
the shortest repr that round-trips (at most 17 significant digits).

Metric file: six rows of six numbers (row-major Z), or one row of six
numbers taken as diagonal weights. Scalar file: one number per line.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .. import rotations as so3
from ..exceptions import DuplicateId, ParseError, UnitsMissing
from ..metric_loss import MetricZ

UNITS = ("m", "mm")
ORDER = "axisangle-translation"
_UNITS_RE = re.compile(r"units\s*=\s*([A-Za-z]+)")


@dataclass
class PosePairSet:
    ids: list
    truth: np.ndarray
    pred: np.ndarray
    units: str = "m"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.truth = np.asarray(self.truth, dtype=float).reshape(-1, 6)
        self.pred = np.asarray(self.pred, dtype=float).reshape(-1, 6)
        if len(self.ids) != len(self.truth) or len(self.truth) != len(self.pred):
            raise ValueError("ids, truth and pred lengths differ")
        if len(set(self.ids)) != len(self.ids):
            raise DuplicateId("pose pair ids must be unique")
        if self.units not in UNITS:
            raise ValueError(f"units must be one of {UNITS}, got {self.units!r}")

    def __len__(self):
        return len(self.ids)


def fmt(x):
    return repr(float(x))


def _split(line):
    return [f.strip() for f in line.split(",")]


def read_pairs(lines):
    units = None
    ids, truth, pred, seen = [], [], [], {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _UNITS_RE.search(line)
            if m and units is None:
                units = m.group(1)
                if units not in UNITS:
                    raise ParseError(f"units must be m or mm, got {units!r}", lineno)
            continue
        if units is None:
            raise UnitsMissing(f"line {lineno}: data before '# units=m|mm' header")
        fields = _split(line)
        if len(fields) != 13:
            raise ParseError(f"expected 13 fields (id + 12 numbers), got {len(fields)}",
                             lineno)
        rid = fields[0]
        if not rid:
            raise ParseError("empty id", lineno)
        if rid in seen:
            raise DuplicateId(f"line {lineno}: id {rid!r} already used on line {seen[rid]}")
        try:
            vals = np.array([float(f) for f in fields[1:]])
        except ValueError as exc:
            raise ParseError(f"bad number ({exc})", lineno) from None
        if not np.all(np.isfinite(vals)):
            raise ParseError("non-finite value", lineno)
        seen[rid] = lineno
        ids.append(rid)
        truth.append(vals[:6])
        pred.append(vals[6:])
    if units is None:
        raise UnitsMissing("missing '# units=m|mm' header")
    truth = np.array(truth).reshape(-1, 6)
    pred = np.array(pred).reshape(-1, 6)
    if len(ids):
        truth[:, :3] = so3.canonical_axis_angle(truth[:, :3])
        pred[:, :3] = so3.canonical_axis_angle(pred[:, :3])
    return PosePairSet(ids, truth, pred, units)


def load_pairs(path):
    with open(path) as fh:
        return read_pairs(fh)


def format_pairs(pairs):
    out = [f"# units={pairs.units}, order={ORDER}"]
    for rid, t, p in zip(pairs.ids, pairs.truth, pairs.pred):
        out.append(", ".join([rid] + [fmt(x) for x in t] + [fmt(x) for x in p]))
    return "\n".join(out) + "\n"


def save_pairs(pairs, path):
    with open(path, "w") as fh:
        fh.write(format_pairs(pairs))


def parse_pose(text):
    """Pose from ``"rx,ry,rz,tx,ty,tz"``."""
    try:
        vals = [float(f) for f in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise ParseError(f"bad pose {text!r} ({exc})") from None
    if len(vals) != 6 or not np.all(np.isfinite(vals)):
        raise ParseError(f"pose needs 6 finite numbers, got {text!r}")
    return np.array(vals)


def _numeric_rows(lines):
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append((lineno, [float(f) for f in re.split(r"[,\s]+", line) if f]))
        except ValueError as exc:
            raise ParseError(f"bad number ({exc})", lineno) from None
    return rows


def load_metric(path):
    with open(path) as fh:
        rows = _numeric_rows(fh)
    if len(rows) == 1 and len(rows[0][1]) == 6:
        return MetricZ.from_weights(rows[0][1])
    if len(rows) == 6 and all(len(r) == 6 for _, r in rows):
        return MetricZ(np.array([r for _, r in rows]))
    bad = next((ln for ln, r in rows if len(r) != 6), None)
    raise ParseError("metric file must hold 6x6 numbers or one row of 6 weights", bad)


def format_metric(Z):
    M = np.asarray(MetricZ(Z) if not isinstance(Z, MetricZ) else Z)
    if np.count_nonzero(M - np.diag(np.diag(M))) == 0:
        return " ".join(fmt(x) for x in np.diag(M)) + "\n"
    return "".join(" ".join(fmt(x) for x in row) + "\n" for row in M)


def format_weights(w):
    return " ".join(fmt(x) for x in w) + "\n"


def load_scalars(path):
    with open(path) as fh:
        rows = _numeric_rows(fh)
    out = []
    for lineno, r in rows:
        if len(r) != 1:
            raise ParseError("expected one number per line", lineno)
        out.append(r[0])
    return np.array(out)
