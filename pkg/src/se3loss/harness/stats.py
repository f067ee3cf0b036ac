"""Two-sample t-test."""

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from ..exceptions import ZeroVariance


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float
    significant: bool


def ttest(a, b, pooled=False, alpha=0.05):
    """Two-sided two-sample t-test; Welch's unequal-variance form by default.

    The p-value is ``I_{df/(df+t^2)}(df/2, 1/2)``, the regularised incomplete
    beta function.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least 2 values")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if pooled:
        sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        se2 = sp2 * (1.0 / na + 1.0 / nb)
        df = float(na + nb - 2)
    else:
        ka, kb = va / na, vb / nb
        se2 = ka + kb
        df = se2 * se2 / (ka * ka / (na - 1) + kb * kb / (nb - 1)) if se2 > 0 else np.inf
    diff = ma - mb
    if se2 == 0:
        if diff == 0:
            raise ZeroVariance("both samples are constant and equal")
        t = float(np.copysign(np.inf, diff))
        return TTestResult(t, 0.0, df, True)
    t = float(diff / np.sqrt(se2))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t, p, float(df), p < alpha)
