"""Log-space helpers shared by the state algebra and the samplers."""
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln


def log_factorial(n):
    """log(n!) for integer (or array of integer) ``n >= 0``."""
    return gammaln(np.asarray(n, dtype=np.float64) + 1.0)


def log_cosh(g):
    # cosh g = e^g (1 + e^{-2g}) / 2, safe for any g >= 0
    return g + np.log1p(np.exp(-2.0 * g)) - np.log(2.0)


def log_tanh(g):
    """log(tanh g) for g > 0; -inf at g = 0."""
    if g == 0:
        return -np.inf
    e = np.exp(-2.0 * g)
    return np.log1p(-e) - np.log1p(e)


class SignedLog(NamedTuple):
    """A real number stored as ``sign * exp(log_abs)``."""

    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        return self.sign * float(np.exp(self.log_abs))


def logsumexp_cumulative(log_terms):
    """Running log-sum-exp of ``log_terms`` (stable for long arrays)."""
    log_terms = np.asarray(log_terms, dtype=np.float64)
    if log_terms.size == 0:
        return log_terms.copy()
    shift = np.max(log_terms)
    if not np.isfinite(shift):
        return np.full_like(log_terms, -np.inf)
    return shift + np.log(np.cumsum(np.exp(log_terms - shift)))
