"""Two-sample distribution checks used by the experiments and tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st


@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical: float
    pvalue: float
    alpha: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical


def ks_critical(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic critical value of the two-sample KS statistic."""
    return math.sqrt(-math.log(alpha / 2) / 2) * math.sqrt((n + m) / (n * m))


def ks_two_sample(a, b, alpha: float = 0.01) -> KSResult:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    res = _st.ks_2samp(a, b)
    return KSResult(float(res.statistic), ks_critical(a.size, b.size, alpha), float(res.pvalue), alpha)


def ks_uniform(u, alpha: float = 0.01) -> KSResult:
    """One-sample KS of ``u`` against Uniform(0, 1), e.g. after a probability-integral transform."""
    u = np.asarray(u, dtype=np.float64)
    res = _st.kstest(u, "uniform")
    crit = math.sqrt(-math.log(alpha / 2) / 2) / math.sqrt(u.size)
    return KSResult(float(res.statistic), crit, float(res.pvalue), alpha)


def mean_and_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        return float(x.mean()) if x.size else math.nan, math.nan
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))
