"""Exact sampling of Macro-state photon numbers at arbitrary gain.

The squared amplitudes factorise into an odd-mode law over ``i`` and an
even-mode law over ``j``.  Both are tabulated once as cumulative tables (built
from a log-space term-ratio recurrence, independent of the log-factorial path
in :mod:`macrostate`) and sampled by binary search.
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from . import _kernels
from .macrostate import (
    DEFAULT_TERM_BUDGET,
    ConvergenceError,
    FockOccupation,
    GainParams,
    MacroLabel,
    even_tail_bound,
    odd_tail_bound,
)
from .rng import as_generator


@dataclass(frozen=True)
class MarginalTables:
    gain: GainParams
    cdf_i: np.ndarray
    cdf_j: np.ndarray
    tail_epsilon: float
    tail_i: float
    tail_j: float


def _log_terms(first: float, log_ratio_fn, n: int) -> np.ndarray:
    k = np.arange(n - 1, dtype=np.float64)
    out = np.empty(n)
    out[0] = first
    out[1:] = first + np.cumsum(log_ratio_fn(k))
    return out


def build_marginal_tables(gain: GainParams, tail_epsilon: float = 1e-12,
                          term_budget: int = DEFAULT_TERM_BUDGET) -> MarginalTables:
    if not tail_epsilon > 0:
        raise ValueError("tail_epsilon must be > 0")
    if gain.g == 0:
        one = np.array([1.0])
        return MarginalTables(gain, one, one.copy(), tail_epsilon, 0.0, 0.0)
    lx = gain.log_x
    # f(i+1)/f(i) = x (2i+3)/(2i+2),  h(j+1)/h(j) = x (2j+1)/(2j+2)
    odd_ratio = lambda i: lx + np.log1p(1.0 / (2.0 * i + 2.0))
    even_ratio = lambda j: lx - np.log1p(1.0 / (2.0 * j + 1.0))

    def grow(first, ratio, bound):
        n = 1024
        while n <= term_budget:
            logs = _log_terms(first, ratio, n)
            tail = bound(logs[-1], n - 1)
            if tail < tail_epsilon:
                return logs, tail
            n *= 2
        raise ConvergenceError(
            f"marginal table at g={gain.g} needs more than {term_budget} terms "
            f"for tail {tail_epsilon:g}")

    log_f, tail_i = grow(-3.0 * gain.log_C, odd_ratio,
                         lambda lf, last: odd_tail_bound(lf, last, gain))
    log_h, tail_j = grow(-1.0 * gain.log_C, even_ratio,
                         lambda lh, last: even_tail_bound(lh, gain))
    cdf_i = np.cumsum(np.exp(log_f))
    cdf_j = np.cumsum(np.exp(log_h))
    for arr in (cdf_i, cdf_j):
        arr.setflags(write=False)
    return MarginalTables(gain, cdf_i, cdf_j, tail_epsilon, tail_i, tail_j)


def draw_indices(tables: MarginalTables, u_i, u_j):
    """Map uniforms to (i, j) by inverse CDF; truncated mass is renormalised."""
    u_i = np.asarray(u_i, dtype=np.float64)
    u_j = np.asarray(u_j, dtype=np.float64)
    i = _kernels.cdf_lookup(tables.cdf_i, u_i * tables.cdf_i[-1])
    j = _kernels.cdf_lookup(tables.cdf_j, u_j * tables.cdf_j[-1])
    return i, j


def occupations_from_indices(i, j, perp):
    """(p, q) arrays in the label's basis: (2i+1, 2j), swapped where ``perp``."""
    odd = 2 * i + 1
    even = 2 * j
    perp = np.asarray(perp, dtype=bool)
    return np.where(perp, even, odd), np.where(perp, odd, even)


def sample_occupations(label: MacroLabel, tables: MarginalTables, rng, n: int):
    """``n`` independent occupations of one Macro-state, as (p, q) arrays."""
    gen = as_generator(rng)
    u = gen.random((n, 2))
    i, j = draw_indices(tables, u[:, 0], u[:, 1])
    return occupations_from_indices(i, j, np.full(n, label.perp))


def sample_occupation(label: MacroLabel, tables: MarginalTables, rng) -> FockOccupation:
    p, q = sample_occupations(label, tables, rng, 1)
    return FockOccupation(int(p[0]), int(q[0]))


# --------------------------------------------------------------------------
# Alice and the conditional Bob ensemble
# --------------------------------------------------------------------------

class AliceOutcome(int, Enum):
    """Alice's single-photon result: projection on |phi_A> or on its orthogonal."""

    PLUS = 1
    PERP = -1


@dataclass(frozen=True)
class MixtureWeights:
    w_parallel: float
    w_perp: float


def conditional_mixture(phi_A: float, alice_outcome, phi_B: float) -> MixtureWeights:
    """Bob's ensemble over {Phi^phi_B, Phi^phi_B_perp} after Alice's result.

    The cross term between the two Macro-states drops out of every
    phi_B-basis photon-number statistic because they live on disjoint parity
    sectors, so the incoherent mixture reproduces the projected state.
    """
    if not (math.isfinite(phi_A) and math.isfinite(phi_B)):
        raise ValueError("phases must be finite")
    half = 0.5 * (phi_B - phi_A)
    s2 = math.sin(half) ** 2
    c2 = math.cos(half) ** 2
    # renormalise away the last-ulp rounding of sin^2 + cos^2
    tot = s2 + c2
    s2, c2 = s2 / tot, c2 / tot
    if AliceOutcome(alice_outcome) is AliceOutcome.PLUS:
        return MixtureWeights(s2, c2)
    return MixtureWeights(c2, s2)


def sample_alice(phi_A: float, rng, n: int | None = None):
    """Fair coin for Alice's outcome; the singlet gives 1/2 in every basis."""
    gen = as_generator(rng)
    if n is None:
        return AliceOutcome.PLUS if gen.random() < 0.5 else AliceOutcome.PERP
    return np.where(gen.random(n) < 0.5, 1, -1).astype(np.int8)
