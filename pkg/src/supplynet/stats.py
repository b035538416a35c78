"""Rank and linear correlation with p-values."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import stats as _st

from .errors import ParameterError

#: below this sample size Spearman p-values are exact (full permutation enumeration)
EXACT_MAX_N = 9


def _check(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("x and y must be 1-d vectors of equal length")
    if len(x) < 3:
        raise ParameterError("need at least 3 paired samples")
    return x, y


def _corr(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    return float(a @ b / math.sqrt((a @ a) * (b @ b)))


def spearman(x, y) -> tuple[float, float]:
    """Spearman's rho (average ranks for ties) and a two-sided p-value.

    ``p`` is exact by permutation for ``n <= 9`` and from the t-distribution
    with ``n - 2`` degrees of freedom otherwise. A constant input gives
    ``(nan, nan)``.
    """
    x, y = _check(x, y)
    rx, ry = _st.rankdata(x), _st.rankdata(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        return math.nan, math.nan
    rho = _corr(rx, ry)
    n = len(x)
    if n <= EXACT_MAX_N:
        return rho, _exact_p(rx, ry, rho)
    if abs(rho) >= 1.0:
        return rho, 0.0
    tstat = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return rho, float(2.0 * _st.t.sf(abs(tstat), n - 2))


def _exact_p(rx: np.ndarray, ry: np.ndarray, rho: float) -> float:
    n = len(rx)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    a = rx - rx.mean()
    b = ry[perms] - ry.mean()
    rhos = (b @ a) / math.sqrt((a @ a) * ((ry - ry.mean()) @ (ry - ry.mean())))
    return float(np.mean(np.abs(rhos) >= abs(rho) - 1e-12))


def pearson(x, y) -> tuple[float, float]:
    """Pearson's r with the standard two-sided p-value; constant input gives nans."""
    x, y = _check(x, y)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan, math.nan
    res = _st.pearsonr(x, y)
    return float(res.statistic), float(res.pvalue)
