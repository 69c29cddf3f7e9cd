import math

import numpy as np
import pytest

from micromacro.dense import (
    HV,
    CutoffError,
    DenseTwoModeState,
    apply_loss,
    build_dense_state,
    label_amplitudes,
    overlap,
    photon_statistics,
    rotate_polarization_basis,
    to_basis,
    total_photon_distribution,
)
from micromacro.macrostate import FockOccupation, PhiPerp, PhiPlus, make_gain, occupation_probability, total_photon_tail

SQ = 1 / math.sqrt(2)


def test_label_amplitudes_reproduce_probabilities():
    gain = make_gain(0.8)
    amps = label_amplitudes(PhiPlus(0.0), gain, 30)
    for p, q in [(1, 0), (3, 4), (5, 2)]:
        assert abs(amps[p, q]) ** 2 == pytest.approx(
            occupation_probability(PhiPlus(0.0), FockOccupation(p, q), gain), rel=1e-12)
    assert amps[3, 0].real < 0 < amps[1, 0].real


def test_overlap_at_cutoff_40_is_one_minus_tail():
    gain = make_gain(1.0)
    st = build_dense_state([(1.0, PhiPlus(0.0))], gain, 40, max_tail=1e-3)
    assert overlap(st, st).real == pytest.approx(1 - total_photon_tail(gain, 40), abs=1e-12)


def test_overlap_converges_with_cutoff():
    st = build_dense_state([(1.0, PhiPlus(0.0))], make_gain(1.0), 120)
    assert abs(overlap(st, st) - 1) < 1e-9


def test_orthogonal_labels():
    gain = make_gain(1.0)
    a = build_dense_state([(1.0, PhiPlus(0.0))], gain, 70)
    b = build_dense_state([(1.0, PhiPerp(0.0))], gain, 70)
    assert abs(overlap(a, b)) < 1e-12


def test_cutoff_error_names_required_cutoff():
    with pytest.raises(CutoffError, match="need cutoff >="):
        build_dense_state([(1.0, PhiPlus(0.0))], make_gain(1.0), 10)


def test_overlap_rejects_mismatch():
    gain = make_gain(0.5)
    a = build_dense_state([(1.0, PhiPlus(0.0))], gain, 30)
    b = build_dense_state([(1.0, PhiPlus(0.0))], gain, 32)
    with pytest.raises(ValueError):
        overlap(a, b)
    with pytest.raises(ValueError):
        overlap(a, to_basis(a, 0.0))


def test_weights_must_be_normalised():
    with pytest.raises(ValueError):
        build_dense_state([(1.0, PhiPlus(0.0)), (1.0, PhiPerp(0.0))], make_gain(0.5), 30)


@pytest.mark.parametrize("phase", [0.0, 0.4, 1.5 * math.pi])
def test_rotation_round_trip_and_unitarity(phase):
    gain = make_gain(0.7)
    own = DenseTwoModeState(30, label_amplitudes(PhiPlus(phase), gain, 30), 0.0, phase)
    hv = rotate_polarization_basis(own, phase)
    assert hv.basis is HV
    assert hv.norm_squared == pytest.approx(own.norm_squared, abs=1e-12)
    back = rotate_polarization_basis(hv, phase, inverse=True)
    np.testing.assert_allclose(back.amplitudes, own.amplitudes, atol=1e-12)


def test_single_photon_rotation():
    # |pi_0> = (|H> + |V>)/sqrt2 in H/V
    amps = np.zeros((4, 4), complex)
    amps[1, 0] = 1
    hv = rotate_polarization_basis(DenseTwoModeState(3, amps, 0.0, 0.0), 0.0)
    assert hv.amplitudes[1, 0] == pytest.approx(SQ)
    assert hv.amplitudes[0, 1] == pytest.approx(SQ)


def test_hong_ou_mandel_like_two_photon():
    # one photon in each of pi_0, pi_0perp maps to (|2,0> - |0,2>)/sqrt2
    amps = np.zeros((3, 3), complex)
    amps[1, 1] = 1
    hv = rotate_polarization_basis(DenseTwoModeState(2, amps, 0.0, 0.0), 0.0)
    assert abs(hv.amplitudes[1, 1]) < 1e-15
    assert abs(hv.amplitudes[2, 0]) == pytest.approx(SQ)
    assert abs(hv.amplitudes[0, 2]) == pytest.approx(SQ)


def test_amplified_h_has_h_minus_v_plus_one():
    st = build_dense_state([(SQ, PhiPlus(0.0)), (SQ, PhiPerp(0.0))], make_gain(1.0), 40, max_tail=1e-3)
    P = photon_statistics(st)
    h, v = np.indices(P.shape)
    assert P[h - v != 1].sum() < 1e-10
    assert P.sum() == pytest.approx(1 - total_photon_tail(make_gain(1.0), 40), abs=1e-10)


def test_total_photon_distribution_closed_form():
    gain = make_gain(0.6)
    st = build_dense_state([(1.0, PhiPlus(0.0))], gain, 70)
    dist = total_photon_distribution(photon_statistics(st))
    k = np.arange(10)
    np.testing.assert_allclose(dist[2 * k + 1], gain.C ** -4 * (k + 1) * gain.x ** k, rtol=1e-10)
    assert dist[::2].sum() < 1e-20


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
def test_apply_loss(eta):
    grid = np.zeros((6, 6))
    grid[3, 2] = 1.0
    lossy = apply_loss(grid, eta)
    assert lossy.sum() == pytest.approx(1.0)
    # mean kept photons
    a, b = np.indices(lossy.shape)
    assert (a * lossy).sum() == pytest.approx(3 * eta)
    assert (b * lossy).sum() == pytest.approx(2 * eta)


def test_state_validation():
    with pytest.raises(ValueError):
        DenseTwoModeState(3, np.zeros((3, 3)), 0.0)
    amps = np.zeros((4, 4))
    amps[3, 3] = 1
    with pytest.raises(ValueError):
        DenseTwoModeState(3, amps, 0.0)


def test_single_quantum_structure_survives_large_cutoff():
    gain = make_gain(1.6)
    st = build_dense_state([(SQ, PhiPlus(0.0)), (SQ, PhiPerp(0.0))], gain, 140, max_tail=1e-3)
    P = photon_statistics(st)
    h, v = np.indices(P.shape)
    assert P[h - v != 1].sum() < 1e-10
    assert st.norm_squared == pytest.approx(1 - total_photon_tail(gain, 140), abs=1e-10)
