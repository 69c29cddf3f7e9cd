"""Exact algebra of the amplified Macro-states.

A single photon injected with equatorial polarization phase ``phi`` leaves
the phase-covariant amplifier as the Macro-state ``Phi^phi``, whose Fock
expansion in the (pi_phi, pi_phi_perp) basis is

    sum_ij gamma_ij sqrt((2i+1)! (2j)!) / (i! j!) |2i+1, 2j>,
    gamma_ij = C^-2 (-Gamma/2)^i (Gamma/2)^j,  C = cosh g, Gamma = tanh g.

The orthogonal state ``Phi^phi_perp`` swaps the roles of the two modes.
The squared amplitude factorises into an odd-mode factor over ``i`` and an
even-mode factor over ``j``; both are normalised negative-binomial-like
series with term ratio tending to Gamma^2 < 1, which is what the certified
tail bounds below exploit.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .logmath import SignedLog, log_cosh, log_factorial, log_tanh

TWO_PI = 2.0 * math.pi

DEFAULT_TERM_BUDGET = 50_000_000


class ConvergenceError(RuntimeError):
    """A series did not reach its tail tolerance within the term budget."""


def wrap_phase(phi: float) -> float:
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")
    r = math.fmod(phi, TWO_PI)
    if r < 0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod rounding on tiny negatives
        r = 0.0
    return r


def same_phase(a: float, b: float, tol: float = 1e-12) -> bool:
    d = abs(wrap_phase(a) - wrap_phase(b))
    return min(d, TWO_PI - d) <= tol


@dataclass(frozen=True)
class GainParams:
    """Amplifier working point. Build with :func:`make_gain`."""

    g: float
    C: float
    Gamma: float
    mbar: float
    log_C: float
    # log(Gamma^2); -inf at g = 0
    log_x: float

    @property
    def x(self) -> float:
        return self.Gamma ** 2


def make_gain(g: float) -> GainParams:
    g = float(g)
    if not math.isfinite(g) or g < 0:
        raise ValueError(f"gain must be finite and >= 0, got {g!r}")
    lc = float(log_cosh(g))
    C = math.exp(lc) if lc < 700 else math.inf
    Gamma = math.tanh(g)
    # sinh^2 g = (cosh 2g - 1) / 2 = expm1(2g)^2 e^{-2g} / 4, both fine; the
    # latter keeps full relative precision near g = 0
    mbar = math.sinh(g) ** 2 if g < 350 else math.inf
    return GainParams(g=g, C=C, Gamma=Gamma, mbar=mbar, log_C=lc, log_x=2.0 * float(log_tanh(g)))


@dataclass(frozen=True)
class EquatorialBasis:
    """Polarization pair pi_phi = (H + e^{i phi} V)/sqrt2 and its orthogonal."""

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_phase(self.phi))

    def swapped(self) -> "EquatorialBasis":
        # the perpendicular state of phase phi is the state of phase phi + pi
        return EquatorialBasis(self.phi + math.pi)

    def __eq__(self, other):
        if not isinstance(other, EquatorialBasis):
            return NotImplemented
        return same_phase(self.phi, other.phi)

    def __hash__(self):
        return hash(round(self.phi, 9) % round(TWO_PI, 9))


@dataclass(frozen=True, eq=False)
class MacroLabel:
    """Which Macro-state: ``Phi^phi`` (perp=False) or ``Phi^phi_perp``."""

    phi: float
    perp: bool = False

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_phase(self.phi))

    @classmethod
    def plus(cls, phi: float) -> "MacroLabel":
        return cls(phi, False)

    @classmethod
    def perpendicular(cls, phi: float) -> "MacroLabel":
        return cls(phi, True)

    @property
    def basis(self) -> EquatorialBasis:
        return EquatorialBasis(self.phi)

    @property
    def injected_phase(self) -> float:
        """Phase of the single photon that was amplified into this state."""
        return wrap_phase(self.phi + math.pi) if self.perp else self.phi

    def canonical(self) -> "MacroLabel":
        return MacroLabel(self.injected_phase, False)

    def __eq__(self, other):
        if not isinstance(other, MacroLabel):
            return NotImplemented
        return same_phase(self.injected_phase, other.injected_phase)

    def __hash__(self):
        return hash(round(self.injected_phase, 9) % round(TWO_PI, 9))

    def __repr__(self):
        kind = "PhiPerp" if self.perp else "PhiPlus"
        return f"{kind}({self.phi:.6g})"


def PhiPlus(phi: float = 0.0) -> MacroLabel:
    return MacroLabel(phi, False)


def PhiPerp(phi: float = 0.0) -> MacroLabel:
    return MacroLabel(phi, True)


@dataclass(frozen=True)
class FockOccupation:
    """Photon counts ``p`` in pi_phi and ``q`` in pi_phi_perp."""

    p: int
    q: int

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"occupation {name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    def swapped(self) -> "FockOccupation":
        return FockOccupation(self.q, self.p)

    def __iter__(self):
        return iter((self.p, self.q))


class Mode(str, Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


# --------------------------------------------------------------------------
# coefficients and probabilities
# --------------------------------------------------------------------------

def gamma_coefficient(i: int, j: int, gain: GainParams) -> SignedLog:
    """gamma_ij as (sign, log|gamma_ij|); sign is (-1)^i."""
    if i < 0 or j < 0:
        raise ValueError("indices must be >= 0")
    sign = -1 if i % 2 else 1
    n = i + j
    if n == 0:
        return SignedLog(sign, -2.0 * gain.log_C)
    if gain.g == 0:
        return SignedLog(sign, -math.inf)
    log_half_gamma = 0.5 * gain.log_x - math.log(2.0)
    return SignedLog(sign, -2.0 * gain.log_C + n * log_half_gamma)


def _own_basis_indices(label: MacroLabel, p: int, q: int):
    """(i, j) of occupation (p, q) for the label, or None off the parity support."""
    odd, even = (q, p) if label.perp else (p, q)
    if odd % 2 == 0 or even % 2 == 1:
        return None
    return (odd - 1) // 2, even // 2


def log_occupation_probability(label: MacroLabel, occ: FockOccupation, gain: GainParams) -> float:
    ij = _own_basis_indices(label, occ.p, occ.q)
    if ij is None:
        return -math.inf
    i, j = ij
    lg = gamma_coefficient(i, j, gain).log_abs
    return float(2.0 * lg + log_factorial(2 * i + 1) + log_factorial(2 * j)
                 - 2.0 * log_factorial(i) - 2.0 * log_factorial(j))


def occupation_probability(label: MacroLabel, occ: FockOccupation, gain: GainParams) -> float:
    """Probability of finding ``occ`` (in the label's own basis) in the Macro-state."""
    return math.exp(log_occupation_probability(label, occ, gain))


def log_odd_factor(i, gain: GainParams):
    """log of the odd-mode factor f(i); sum_i f(i) = 1."""
    i = np.asarray(i, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        lin = np.where(i > 0, i * (gain.log_x - 2.0 * math.log(2.0)), 0.0)
    return -3.0 * gain.log_C + lin + log_factorial(2 * i + 1) - 2.0 * log_factorial(i)


def log_even_factor(j, gain: GainParams):
    """log of the even-mode factor h(j); sum_j h(j) = 1."""
    j = np.asarray(j, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        lin = np.where(j > 0, j * (gain.log_x - 2.0 * math.log(2.0)), 0.0)
    return -1.0 * gain.log_C + lin + log_factorial(2 * j) - 2.0 * log_factorial(j)


def odd_tail_bound(log_f_last: float, i_last: int, gain: GainParams) -> float:
    """Certified bound on sum_{i > i_last} f(i).

    Term ratios x (2i+3)/(2i+2) decrease monotonically towards x, so the tail
    is dominated by a geometric series with the ratio at ``i_last``.
    """
    if gain.g == 0:
        return 0.0
    r = gain.x * (2 * i_last + 3) / (2 * i_last + 2)
    if r >= 1.0:
        return math.inf
    return math.exp(log_f_last) * r / (1.0 - r)


def even_tail_bound(log_h_last: float, gain: GainParams) -> float:
    """Certified bound on sum_{j > j_last} h(j); ratios increase towards x."""
    if gain.g == 0:
        return 0.0
    # x / (1 - x) = sinh^2 g, 1 - x = C^-2 exactly
    return math.exp(log_h_last) * gain.mbar


def _grow_until(log_fn, bound_fn, eps, budget):
    """Extend a log-term array geometrically until ``bound_fn`` certifies ``eps``."""
    n = 256
    while True:
        if n > budget:
            raise ConvergenceError(
                f"series tail did not drop below {eps:g} within {budget} terms")
        logs = log_fn(np.arange(n))
        tail = bound_fn(logs[-1], n - 1)
        if tail < eps:
            return logs, tail
        n *= 2


def factor_series(gain: GainParams, eps: float, budget: int = DEFAULT_TERM_BUDGET):
    """Log odd/even factor arrays and their certified tail bounds, each tail < eps."""
    if gain.g == 0:
        return np.array([0.0]), 0.0, np.array([0.0]), 0.0
    log_f, tail_f = _grow_until(lambda i: log_odd_factor(i, gain),
                                lambda lf, last: odd_tail_bound(lf, last, gain), eps, budget)
    log_h, tail_h = _grow_until(lambda j: log_even_factor(j, gain),
                                lambda lh, last: even_tail_bound(lh, gain), eps, budget)
    return log_f, tail_f, log_h, tail_h


def normalization_defect(label: MacroLabel, gain: GainParams, tail_epsilon: float,
                         term_budget: int = DEFAULT_TERM_BUDGET) -> float:
    """|1 - sum of occupation probabilities| over a certified support.

    The support is the rectangle of (i, j) indices whose excluded mass is
    certified below ``tail_epsilon``.  The double sum is evaluated through the
    exact factorisation ``P(i, j) = f(i) h(j)``.  The label only fixes which
    mode is odd; the defect is the same for every label.
    """
    if not tail_epsilon > 0:
        raise ValueError("tail_epsilon must be > 0")
    if gain.g == 0:
        return abs(1.0 - occupation_probability(label, FockOccupation(*((0, 1) if label.perp else (1, 0))), gain))
    log_f, _, log_h, _ = factor_series(gain, tail_epsilon / 2.0, term_budget)
    total = math.fsum(np.exp(log_f)) * math.fsum(np.exp(log_h))
    return abs(1.0 - total)


def total_photon_tail(gain: GainParams, cutoff: int) -> float:
    """Exact probability that a Macro-state holds more than ``cutoff`` photons.

    The total photon number is 2k + 1 with P(k) = C^-4 (k + 1) x^k, so the
    tail beyond k = K is x^(K+1) ((K + 2) - (K + 1) x).
    """
    if cutoff < 1:
        return 1.0
    if gain.g == 0:
        return 0.0
    K = (cutoff - 1) // 2
    x = gain.x
    return math.exp((K + 1) * gain.log_x) * ((K + 2) - (K + 1) * x)


def required_cutoff(gain: GainParams, max_tail: float) -> int:
    cutoff = 1
    while total_photon_tail(gain, cutoff) >= max_tail:
        cutoff += 2
    return cutoff


def mean_photon_number(label: MacroLabel, mode: Mode | str, gain: GainParams,
                       method: str = "analytic", tail_epsilon: float = 1e-14,
                       term_budget: int = DEFAULT_TERM_BUDGET) -> float:
    """Mean photon number in ``mode`` of the label's own basis."""
    mode = Mode(mode)
    # own-polarization mode carries the odd count for Phi^phi
    odd_mode = Mode.PERPENDICULAR if label.perp else Mode.PARALLEL
    if method == "analytic":
        return 3.0 * gain.mbar + 1.0 if mode is odd_mode else gain.mbar
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    if gain.g == 0:
        return 1.0 if mode is odd_mode else 0.0
    # first moments need a slightly tighter truncation than the mass itself
    eps = tail_epsilon / max(1.0, 10.0 * (gain.mbar + 1.0))
    log_f, _, log_h, _ = factor_series(gain, eps, term_budget)
    if mode is odd_mode:
        i = np.arange(log_f.size)
        return math.fsum((2 * i + 1) * np.exp(log_f))
    j = np.arange(log_h.size)
    return math.fsum(2 * j * np.exp(log_h))


def occupation_window(label: MacroLabel, gain: GainParams, max_p: int, max_q: int) -> np.ndarray:
    """Probabilities on the window p <= max_p, q <= max_q (own basis), as grid[p, q]."""
    grid = np.zeros((max_p + 1, max_q + 1))
    odd_n, even_n = (max_q, max_p) if label.perp else (max_p, max_q)
    if odd_n < 1:
        return grid
    i = np.arange((odd_n - 1) // 2 + 1)
    j = np.arange(even_n // 2 + 1)
    if gain.g == 0:
        i, j = i[:1], j[:1]
    P = np.exp(log_odd_factor(i, gain)[:, None] + log_even_factor(j, gain)[None, :])
    odd, even = 2 * i + 1, 2 * j
    if label.perp:
        grid[np.ix_(even, odd)] = P.T
    else:
        grid[np.ix_(odd, even)] = P
    return grid


def window_for_mass(gain: GainParams, missing: float, limit: int = 5000):
    """Smallest (max_odd, max_even) photon window whose excluded mass is < ``missing``."""
    if gain.g == 0:
        return 1, 0
    log_f, tail_f, log_h, tail_h = factor_series(gain, missing / 4.0)

    def last_needed(logs, tail):
        # excluded[k] = mass beyond index k, including the certified remainder
        excluded = np.cumsum(np.exp(logs)[::-1])[::-1] - np.exp(logs) + tail
        return int(np.argmax(excluded < missing / 2.0))

    max_odd = 2 * last_needed(log_f, tail_f) + 1
    max_even = 2 * last_needed(log_h, tail_h)
    if max(max_odd, max_even) > limit:
        raise ConvergenceError(
            f"a window holding all but {missing:g} of the mass at g={gain.g} needs "
            f"{max(max_odd, max_even)} photons per mode (limit {limit})")
    return max_odd, max_even
