"""Binomial pmf/cdf primitives with a strict-inequality boundary rule.

All probabilities are computed in log space (gammaln + xlogy/xlog1py) so
that tail terms underflow gracefully instead of overflowing intermediate
binomial coefficients.  Success probabilities of exactly 0 or 1 fall out
of the log-space formulas without special casing because xlogy(0, 0) = 0
and xlog1py(0, -1) = 0.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

# Absolute tolerance deciding whether a real threshold is an integer.
# Support values arrive through floating arithmetic, so exact comparison
# would misclassify values like 2.0000000000000004.
INT_TOL = 1e-9

__all__ = [
    "INT_TOL",
    "binom_pmf",
    "binom_cdf",
    "binom_cdf_strict",
    "is_integral",
    "log_pmf_matrix",
    "pmf_matrix",
]


def is_integral(t: float, tol: float = INT_TOL) -> bool:
    """True when t is within tol of an integer."""
    return abs(t - round(t)) <= tol


@functools.lru_cache(maxsize=64)
def _log_choose(n: int) -> np.ndarray:
    k = np.arange(n + 1, dtype=float)
    out = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    out.flags.writeable = False
    return out


def log_pmf_matrix(n: int, p: np.ndarray) -> np.ndarray:
    """Log binomial pmf for all k at once.

    Returns an array of shape (len(p), n + 1) whose [i, k] entry is
    log P{Bin(n, p[i]) = k}.  Rows for p of exactly 0 or 1 contain the
    correct point masses (-inf elsewhere).
    """
    p = np.asarray(p, dtype=float)[:, None]
    k = np.arange(n + 1, dtype=float)[None, :]
    return _log_choose(n)[None, :] + xlogy(k, p) + xlog1py(n - k, -p)


def pmf_matrix(n: int, p: np.ndarray) -> np.ndarray:
    """Binomial pmf for all k at once, shape (len(p), n + 1)."""
    return np.exp(log_pmf_matrix(n, p))


def binom_pmf(k: int, n: int, p: float) -> float:
    """P{Bin(n, p) = k}; zero off the support, so total in k."""
    if k < 0 or k > n:
        return 0.0
    return float(np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
                        + xlogy(k, p) + xlog1py(n - k, -p)))


def binom_cdf(t: float, n: int, p: float) -> float:
    """P{Bin(n, p) <= t} for real t."""
    if t < 0:
        return 0.0
    if t >= n:
        return 1.0
    kk = math.floor(t)
    row = np.exp(log_pmf_matrix(n, np.array([p]))[0, : kk + 1])
    return float(min(1.0, row.sum()))


def binom_cdf_strict(t: float, n: int, p: float) -> float:
    """P{Bin(n, p) < t}.

    Equals P{Bin <= t - 1} when t is an integer (within INT_TOL) and
    P{Bin <= t} elsewhere.
    """
    if is_integral(t):
        return binom_cdf(round(t) - 1, n, p)
    return binom_cdf(t, n, p)
