"""Cross-checks between the fast samplers and the dense Fock oracle.

Each check returns a :class:`CheckResult` with the measured distance so the
CLI can print a machine-readable report.
"""
from dataclasses import asdict, dataclass
import math
from typing import List

import numpy as np

from .dense import (
    HV,
    CutoffError,
    DenseTwoModeState,
    apply_loss,
    build_dense_state,
    photon_statistics,
    to_basis,
)
from .detection import ideal_difference_array, thin_binomial
from .macrostate import (
    FockOccupation,
    GainParams,
    PhiPerp,
    PhiPlus,
    normalization_defect,
    occupation_probability,
    required_cutoff,
    total_photon_tail,
)
from .rng import RngStream
from .sampling import (
    AliceOutcome,
    build_marginal_tables,
    conditional_mixture,
    sample_occupations,
)

SQ = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float

    def as_dict(self):
        return asdict(self)


def occupation_grid(label, gain: GainParams, cutoff: int) -> np.ndarray:
    """occupation_probability evaluated on every (p, q) with p + q <= cutoff."""
    grid = np.zeros((cutoff + 1, cutoff + 1))
    for p in range(cutoff + 1):
        for q in range(cutoff + 1 - p):
            grid[p, q] = occupation_probability(label, FockOccupation(p, q), gain)
    return grid


def single_quantum_mass(gain: GainParams, cutoff: int, max_tail: float = 1e-3):
    """Mass of the amplified |H>, |V> outside h - v = +1 and -1 respectively."""
    out = []
    for sign, target in ((1.0, 1), (-1.0, -1)):
        st = build_dense_state([(SQ, PhiPlus(0.0)), (sign * SQ, PhiPerp(0.0))], gain, cutoff,
                               max_tail=max_tail)
        P = photon_statistics(st)
        h, v = np.indices(P.shape)
        out.append(float(P[(h - v) != target].sum()))
    return tuple(out)


def entangled_state_hv(gain: GainParams, cutoff: int, reference_phase: float = 0.0,
                       max_tail: float = 1e-3) -> np.ndarray:
    """Micro-Macro state as an array [h, v, alice] with Alice in the H/V basis.

    2^-1/2 (|Phi^ref> |ref_perp>_A - |Phi^ref_perp> |ref>_A).
    """
    b_par = build_dense_state([(1.0, PhiPlus(reference_phase))], gain, cutoff, max_tail=max_tail)
    b_perp = build_dense_state([(1.0, PhiPerp(reference_phase))], gain, cutoff, max_tail=max_tail)
    e = np.exp(1j * reference_phase)
    a_par = np.array([1.0, e]) * SQ
    a_perp = np.array([1.0, -e]) * SQ
    return SQ * (b_par.amplitudes[:, :, None] * a_perp[None, None, :]
                 - b_perp.amplitudes[:, :, None] * a_par[None, None, :])


def project_alice(sigma: np.ndarray, phi_A: float, outcome: AliceOutcome) -> np.ndarray:
    """Bob's unnormalised H/V amplitudes after Alice's projection."""
    e = np.exp(1j * phi_A)
    vec = np.array([1.0, e]) * SQ if AliceOutcome(outcome) is AliceOutcome.PLUS \
        else np.array([1.0, -e]) * SQ
    return np.tensordot(sigma, vec.conj(), axes=([2], [0]))


def mixture_lemma_error(gain: GainParams, cutoff: int, n_grid: int = 8,
                        reference_phase: float = 0.0, max_tail: float = 1e-3) -> float:
    """Largest pointwise gap between projected and mixture-model Bob statistics."""
    sigma = entangled_state_hv(gain, cutoff, reference_phase, max_tail)
    tail = total_photon_tail(gain, cutoff)
    P_par = occupation_grid(PhiPlus(0.0), gain, cutoff)
    P_perp = occupation_grid(PhiPerp(0.0), gain, cutoff)
    phases = 2 * math.pi * np.arange(n_grid) / n_grid
    worst = 0.0
    for phi_A in phases:
        for outcome in AliceOutcome:
            bob_hv = project_alice(sigma, phi_A, outcome)
            for phi_B in phases:
                st = to_basis(DenseTwoModeState(cutoff, bob_hv, tail, HV), phi_B)
                exact = photon_statistics(st)
                w = conditional_mixture(phi_A, outcome, phi_B)
                # joint probability of Alice's outcome (1/2) and Bob's occupation
                model = 0.5 * (w.w_parallel * P_par + w.w_perp * P_perp)
                worst = max(worst, float(np.max(np.abs(exact - model))))
    return worst


def sampler_tv(gain: GainParams, draws: int, seed: int = 0, cutoff: int | None = None,
               max_tail: float = 1e-9) -> float:
    """TV distance between sampled occupations of Phi^+ and the dense oracle.

    The oracle is built in the state's own basis; mass beyond the cutoff
    (sampled or exact) counts fully towards the distance.
    """
    if cutoff is None:
        cutoff = required_cutoff(gain, max_tail)
    exact = photon_statistics(build_dense_state([(1.0, PhiPlus(0.0))], gain, cutoff,
                                                max_tail=max(max_tail, 1.01 * total_photon_tail(gain, cutoff)),
                                                basis=0.0))
    tables = build_marginal_tables(gain)
    p, q = sample_occupations(PhiPlus(0.0), tables, RngStream(seed, 1), draws)
    inside = p + q <= cutoff
    emp = np.zeros_like(exact)
    np.add.at(emp, (p[inside], q[inside]), 1.0)
    emp /= draws
    outside_emp = 1.0 - inside.mean()
    outside_exact = max(0.0, 1.0 - exact.sum())
    return 0.5 * (float(np.abs(emp - exact).sum()) + outside_emp + outside_exact)


def loss_commutation_tv(gain: GainParams, eta: float, draws: int, seed: int = 0,
                        cutoff: int = 60) -> float:
    """TV between thinned samples and the dense oracle pushed through loss."""
    grid = photon_statistics(build_dense_state([(1.0, PhiPlus(0.0))], gain, cutoff,
                                               max_tail=1.0, basis=0.0))
    lossy = apply_loss(grid, eta)
    tables = build_marginal_tables(gain)
    gen = RngStream(seed, 2).generator()
    p, q = sample_occupations(PhiPlus(0.0), tables, gen, draws)
    a, b = thin_binomial(p, eta, gen), thin_binomial(q, eta, gen)
    inside = (p + q) <= cutoff
    emp = np.zeros_like(lossy)
    np.add.at(emp, (a[inside], b[inside]), 1.0)
    emp /= draws
    return 0.5 * float(np.abs(emp - lossy).sum()) + 0.5 * float(1.0 - inside.mean())


def difference_discriminator_on_h(gain: GainParams, cutoff: int, draws: int, seed: int = 0,
                                  max_tail: float = 1e-3) -> float:
    """Fraction of dense-oracle samples of the amplified |H> not judged +1."""
    st = build_dense_state([(SQ, PhiPlus(0.0)), (SQ, PhiPerp(0.0))], gain, cutoff, max_tail=max_tail)
    P = photon_statistics(st).ravel()
    gen = RngStream(seed, 3).generator()
    flat = gen.choice(P.size, size=draws, p=P / P.sum())
    h, v = np.divmod(flat, cutoff + 1)
    return float(np.mean(ideal_difference_array(h, v) != 1))


def oracle_report(gain: GainParams, cutoff: int, draws: int = 1_000_000, seed: int = 0,
                  max_tail: float = 1e-3) -> List[CheckResult]:
    """Run every oracle invariant at (gain, cutoff).

    Raises :class:`CutoffError` when the cutoff leaves more than ``max_tail``
    of the state unrepresented.
    """
    tail = total_photon_tail(gain, cutoff)
    if cutoff < 1 or tail >= max_tail:
        need = required_cutoff(gain, max_tail)
        raise CutoffError(f"cutoff {cutoff} leaves tail mass {tail:.3g} at g={gain.g}; "
                          f"need cutoff >= {need}")
    res = []
    defect = normalization_defect(PhiPlus(0.0), gain, 1e-10)
    res.append(CheckResult("normalization_defect", defect < 2e-10, defect, 2e-10))
    off_h, off_v = single_quantum_mass(gain, cutoff, max_tail)
    res.append(CheckResult("single_quantum_H", off_h < 1e-10, off_h, 1e-10))
    res.append(CheckResult("single_quantum_V", off_v < 1e-10, off_v, 1e-10))
    mix = mixture_lemma_error(gain, min(cutoff, 40), 8, max_tail=max_tail)
    res.append(CheckResult("mixture_lemma", mix < 1e-9, mix, 1e-9))
    tv = sampler_tv(gain, draws, seed, cutoff, max_tail=max_tail)
    res.append(CheckResult("sampler_tv", tv < 0.01, tv, 0.01))
    bad = difference_discriminator_on_h(gain, cutoff, min(draws, 100_000), seed, max_tail)
    res.append(CheckResult("difference_discriminator_H", bad == 0.0, bad, 0.0))
    return res
