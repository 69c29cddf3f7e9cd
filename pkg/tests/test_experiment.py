import math

import numpy as np
import pytest

from micromacro.detection import DetectionParams, OFOutcome
from micromacro.experiment import (
    CoincidenceCounts,
    Discriminator,
    ExperimentConfig,
    NoDataError,
    VisibilityEstimate,
    estimate_visibility,
    filtering_probability,
    fit_fringe,
    inferred_source_photons,
    run_fringe_scan,
    run_pool,
    run_trial,
    run_witness,
    s_statistic,
    simulate_block,
    threshold_sweep,
)
from micromacro.macrostate import make_gain
from micromacro.rng import RngStream
from micromacro.sampling import AliceOutcome


def small_config(**kw):
    base = dict(gain=make_gain(1.0), detection=DetectionParams(eta_B=0.5), phi_B=0.0,
                phi_A_list=(0.0, math.pi / 2), trials=20_000, seed=11, threshold_multiple=2.0,
                block_size=4096)
    base.update(kw)
    return ExperimentConfig(**base)


def test_counts_arithmetic():
    a = CoincidenceCounts(1, 2, 3, 4, 5, 20)
    b = a + a
    assert b.as_tuple() == (2, 4, 6, 8, 10, 40)
    assert a.conclusive == 10 and a.triggered == 15


@pytest.mark.parametrize("counts,expected", [
    (CoincidenceCounts(0, 50, 50, 0, 0, 100), 1.0),
    (CoincidenceCounts(25, 25, 25, 25, 0, 100), 0.0),
    (CoincidenceCounts(10, 30, 30, 10, 0, 80), 0.5),
])
def test_estimate_visibility(counts, expected):
    v = estimate_visibility(counts, 2)
    assert v.value == pytest.approx(expected)
    assert v.stderr == pytest.approx(math.sqrt((1 - expected ** 2) / counts.conclusive))


def test_estimate_visibility_no_data():
    with pytest.raises(NoDataError):
        estimate_visibility(CoincidenceCounts(0, 0, 0, 0, 5, 5))


def test_s_statistic():
    s, e = s_statistic([VisibilityEstimate(0.5, 0.03, 2), VisibilityEstimate(0.6, 0.04, 3)])
    assert s == pytest.approx(1.1) and e == pytest.approx(0.05)
    with pytest.raises(ValueError):
        s_statistic([VisibilityEstimate(0.5, 0.0, 2), VisibilityEstimate(0.5, 0.0, 2)])


def test_filtering_probability():
    p, err = filtering_probability(CoincidenceCounts(1, 1, 1, 1, 96, 100))
    assert p == pytest.approx(0.04)
    assert err == pytest.approx(math.sqrt(0.04 * 0.96 / 100))


def test_simulate_block_shapes_and_parity():
    cfg = small_config(detection=DetectionParams(eta_B=1.0))
    b = simulate_block(cfg, 0.0, RngStream(0, 0), 1000)
    assert b.det_plus.shape == (1000,)
    odd_mode = np.where(b.perp, b.occ_minus, b.occ_plus)
    assert np.all(odd_mode % 2 == 1)
    assert set(np.unique(b.alice)) <= {-1, 1}


def test_run_trial_record():
    rec = run_trial(small_config(), 0.0, RngStream(0, 0))
    assert rec.alice in (AliceOutcome.PLUS, AliceOutcome.PERP)
    assert isinstance(rec.bob, OFOutcome)


def test_eta_A_drops_triggers():
    cfg = small_config(detection=DetectionParams(eta_B=0.5, eta_A=0.25))
    pool = run_pool(cfg)
    frac = pool.n_triggered.sum() / (cfg.trials * len(cfg.phi_A_list))
    assert frac == pytest.approx(0.25, abs=0.01)


def test_pool_is_deterministic_and_worker_independent():
    cfg = small_config()
    a = run_pool(cfg)
    b = run_pool(ExperimentConfig(**{**cfg.__dict__, "workers": 2}))
    assert [c.as_tuple() for c in a.counts[0]] == [c.as_tuple() for c in b.counts[0]]
    assert a.mean_arm_signal == b.mean_arm_signal
    c = run_pool(ExperimentConfig(**{**cfg.__dict__, "seed": 12}))
    assert [x.as_tuple() for x in a.counts[0]] != [x.as_tuple() for x in c.counts[0]]


def test_relative_threshold_uses_measured_arm_signal():
    cfg = small_config()
    pool = run_pool(cfg)
    mbar = math.sinh(1.0) ** 2
    assert pool.mean_arm_signal == pytest.approx(0.5 * 0.5 * (4 * mbar + 1), rel=0.02)
    assert pool.thresholds[0] == pytest.approx(2.0 * pool.mean_arm_signal, rel=0.01)


def test_absolute_threshold():
    cfg = small_config(threshold_multiple=None, detection=DetectionParams(eta_B=0.5, threshold=3.0))
    assert run_pool(cfg).thresholds[0] == 3.0


def test_sweep_acceptance_non_increasing():
    curve = threshold_sweep(small_config(trials=30_000), [0.0, 0.5, 1.0, 2.0, 4.0])
    ps = [c.p for c in curve]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    with pytest.raises(ValueError):
        threshold_sweep(small_config(), [2.0, 1.0])


def test_fit_fringe_recovers_cosine():
    phi = 2 * np.pi * np.arange(12) / 12
    y = 40 + 30 * np.cos(phi + 0.4)
    fit = fit_fringe(phi, y)
    assert fit.offset == pytest.approx(40)
    assert fit.amplitude == pytest.approx(30)
    assert fit.phase == pytest.approx(0.4)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.period == pytest.approx(2 * np.pi, rel=1e-6)


def test_fringe_scan_follows_cosine():
    cfg = small_config(phi_A_list=tuple(2 * np.pi * np.arange(6) / 6), discriminator=Discriminator.IDEAL_PARITY,
                       detection=DetectionParams(eta_B=1.0), trials=5000)
    scan = run_fringe_scan(cfg)
    pp = np.array([c.n_pp for c in scan.counts], float)
    fit = fit_fringe(scan.phi_A, pp)
    assert fit.r2 > 0.99
    # same basis: Alice + leaves Bob in Phi^perp, so ++ is at its minimum at phi_A = phi_B
    assert pp[0] < 0.05 * pp.max()


def test_inferred_photons_unfiltered():
    cfg = small_config(detection=DetectionParams(eta_B=0.1), trials=50_000)
    b = simulate_block(cfg, 0.0, RngStream(1, 0), 100_000)
    mean, err = inferred_source_photons(b, 0.1)
    assert abs(mean - (4 * math.sinh(1.0) ** 2 + 1)) < 4 * err
    acc, _ = inferred_source_photons(b, 0.1, threshold=2.0)
    assert acc > mean


def test_witness_ideal_parity():
    cfg = small_config(discriminator=Discriminator.IDEAL_PARITY, detection=DetectionParams(eta_B=1.0),
                       trials=10_000)
    w = run_witness(cfg)
    assert w.V2.value == 1.0 and w.V3.value == 1.0
    assert w.violated


def test_decorrelated_control():
    cfg = small_config(discriminator=Discriminator.IDEAL_PARITY, detection=DetectionParams(eta_B=1.0),
                       trials=20_000, decorrelate=True)
    w = run_witness(cfg)
    assert abs(w.S) < 4 * w.S_err + 1e-12
    assert not w.violated


def test_ideal_difference_in_hv():
    cfg = small_config(discriminator=Discriminator.IDEAL_DIFFERENCE, detection=DetectionParams(eta_B=1.0),
                       gain=make_gain(0.8), trials=5000, phi_A_list=(0.0,))
    c = run_pool(cfg).counts[0][0]
    # Alice H heralds Bob V and vice versa: perfect anticorrelation, never inconclusive
    assert c.n_pp == 0 and c.n_mm == 0 and c.n_inconclusive == 0
