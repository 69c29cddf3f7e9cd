"""Dense truncated two-mode Fock representation, the exact small-gain oracle.

Amplitudes live in a square ``(cutoff + 1) x (cutoff + 1)`` array indexed by
(photons in first mode, photons in second mode); entries with ``p + q >
cutoff`` are always zero.  ``basis`` records which mode pair the indices
refer to: an equatorial phase, or ``None`` for the H/V reference pair.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .macrostate import (
    GainParams,
    MacroLabel,
    gamma_coefficient,
    required_cutoff,
    same_phase,
    total_photon_tail,
    wrap_phase,
)
from .logmath import log_factorial

HV = None


class CutoffError(ValueError):
    """Requested gain needs a larger Fock cutoff than was given."""


@dataclass(frozen=True)
class DenseTwoModeState:
    cutoff: int
    amplitudes: np.ndarray
    tail_bound: float
    basis: Optional[float] = HV

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (self.cutoff + 1, self.cutoff + 1):
            raise ValueError(f"amplitude array shape {a.shape} does not match cutoff {self.cutoff}")
        if np.any(a[_outside_mask(self.cutoff)] != 0):
            raise ValueError("amplitudes beyond the cutoff must be zero")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        if self.basis is not None:
            object.__setattr__(self, "basis", wrap_phase(self.basis))

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@lru_cache(maxsize=64)
def _outside_mask(cutoff):
    p, q = np.indices((cutoff + 1, cutoff + 1))
    m = p + q > cutoff
    m.setflags(write=False)
    return m


def _same_basis(a, b):
    if a is None or b is None:
        return a is None and b is None
    return same_phase(a, b)


def label_amplitudes(label: MacroLabel, gain: GainParams, cutoff: int) -> np.ndarray:
    """Amplitudes of one Macro-state in its own basis ``label.phi``.

    The printed expansion carries real amplitudes; for an injected phase
    ``theta`` the phase-covariant amplifier additionally multiplies the
    (2i+1, 2j) amplitude by exp(-i theta (i + j)).  That factor is invisible
    in same-basis photon statistics but fixes the relative phases between
    Macro-states of different bases.
    """
    size = cutoff + 1
    amps = np.zeros((size, size), dtype=np.complex128)
    theta = label.injected_phase
    n_i = (cutoff - 1) // 2 + 1 if cutoff >= 1 else 0
    for i in range(n_i):
        odd = 2 * i + 1
        j = np.arange((cutoff - odd) // 2 + 1)
        even = 2 * j
        sign = -1.0 if i % 2 else 1.0
        lg = np.array([gamma_coefficient(i, int(jj), gain).log_abs for jj in j])
        log_mag = lg + 0.5 * (log_factorial(odd) + log_factorial(even)) - log_factorial(i) - log_factorial(j)
        vals = sign * np.exp(log_mag) * np.exp(-1j * theta * (i + j))
        if label.perp:
            amps[even, odd] = vals
        else:
            amps[odd, even] = vals
    return amps


@lru_cache(maxsize=128)
def _sectors(cutoff: int, phase: float) -> np.ndarray:
    e = complex(math.cos(phase), math.sin(phase))
    s = 1.0 / math.sqrt(2.0)
    U = _kernels.rotation_sectors(cutoff, s, s * e, s, -s * e)
    U.setflags(write=False)
    return U


def rotate_polarization_basis(state: DenseTwoModeState, phase: float,
                              inverse: bool = False) -> DenseTwoModeState:
    """Re-express a state between the equatorial pair of ``phase`` and H/V.

    Forward: amplitudes indexed in the (pi_phase, pi_phase_perp) pair are
    mapped to the H/V pair.  ``inverse=True`` goes the other way.  The map is
    block-diagonal in total photon number.
    """
    phase = wrap_phase(phase)
    src, dst = (phase, HV) if not inverse else (HV, phase)
    if state.basis is not HV or inverse:
        if not _same_basis(state.basis, src):
            raise ValueError(f"state is expressed in basis {state.basis!r}, expected {src!r}")
    U = _sectors(state.cutoff, round(phase, 15))
    a = state.amplitudes
    out = np.zeros_like(a)
    for n in range(state.cutoff + 1):
        k = np.arange(n + 1)
        vec = a[k, n - k]
        block = U[n, :n + 1, :n + 1]
        out[k, n - k] = (block.conj().T @ vec) if inverse else (block @ vec)
    return DenseTwoModeState(state.cutoff, out, state.tail_bound, dst)


def to_basis(state: DenseTwoModeState, basis: Optional[float]) -> DenseTwoModeState:
    """Re-express ``state`` in ``basis`` (an equatorial phase or None for H/V)."""
    if _same_basis(state.basis, basis):
        return state
    if state.basis is not HV:
        state = rotate_polarization_basis(state, state.basis)
    if basis is HV:
        return state
    return rotate_polarization_basis(state, basis, inverse=True)


def build_dense_state(coeffs: Sequence[Tuple[complex, MacroLabel]], gain: GainParams,
                      cutoff: int, max_tail: float = 1e-6,
                      basis: Optional[float] = HV) -> DenseTwoModeState:
    """Dense Fock expansion of sum_k w_k |Phi^{label_k}>, by default in H/V."""
    weights = np.array([complex(w) for w, _ in coeffs])
    if len(coeffs) == 0:
        raise ValueError("need at least one component")
    if abs(float(np.sum(np.abs(weights) ** 2)) - 1.0) > 1e-12:
        raise ValueError("weights must satisfy sum |w|^2 = 1")
    tail = total_photon_tail(gain, cutoff)
    if tail >= max_tail:
        need = required_cutoff(gain, max_tail)
        raise CutoffError(
            f"cutoff {cutoff} leaves tail mass {tail:.3g} >= {max_tail:g} at g={gain.g}; "
            f"need cutoff >= {need}")
    total = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    for w, label in coeffs:
        own = DenseTwoModeState(cutoff, label_amplitudes(label, gain, cutoff), tail, label.phi)
        total += complex(w) * to_basis(own, basis).amplitudes
    # norm of the discarded part of a sum is at most the sum of the norms
    tail_bound = float(np.sum(np.abs(weights))) ** 2 * tail
    return DenseTwoModeState(cutoff, total, min(tail_bound, 1.0), basis)


def overlap(a: DenseTwoModeState, b: DenseTwoModeState) -> complex:
    """<a|b>."""
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    if not _same_basis(a.basis, b.basis):
        raise ValueError(f"basis mismatch: {a.basis!r} vs {b.basis!r}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def photon_statistics(state: DenseTwoModeState) -> np.ndarray:
    """Joint photon-number distribution over the state's own basis."""
    return np.abs(state.amplitudes) ** 2


def total_photon_distribution(grid: np.ndarray) -> np.ndarray:
    n = grid.shape[0]
    out = np.zeros(n)
    for k in range(n):
        i = np.arange(k + 1)
        out[k] = grid[i, k - i].sum()
    return out


def apply_loss(grid: np.ndarray, eta: float) -> np.ndarray:
    """Photon statistics after independent per-photon loss on both modes."""
    from scipy.stats import binom

    n = grid.shape[0]
    kept = np.arange(n)
    L = binom.pmf(kept[:, None], kept[None, :], eta)  # L[a, p] = P(a kept of p)
    return L @ grid @ L.T
