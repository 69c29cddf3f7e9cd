import numpy as np
import pytest

from micromacro.detection import (
    DetectionEvent,
    DetectionParams,
    OFOutcome,
    expected_arm_signal,
    ideal_difference_array,
    ideal_difference_discriminator,
    ideal_parity_array,
    ideal_parity_discriminator,
    orthogonality_filter,
    orthogonality_filter_array,
    pm_response,
    thin_binomial,
)
from micromacro.macrostate import FockOccupation
from micromacro.rng import RngStream


@pytest.mark.parametrize("kw", [{"eta_B": 1.2}, {"eta_A": -0.1}, {"pm_noise": -1}, {"threshold": -2}])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        DetectionParams(**kw)


def test_thin_binomial_limits():
    assert thin_binomial(17, 1.0, None) == 17
    assert thin_binomial(17, 0.0, None) == 0
    np.testing.assert_array_equal(thin_binomial(np.array([0, 5]), 1.0, None), [0, 5])
    with pytest.raises(ValueError):
        thin_binomial(3, 1.5, None)


def test_thin_binomial_moments():
    out = thin_binomial(np.full(200_000, 1000), 0.02, RngStream(0, 0))
    assert out.mean() == pytest.approx(20.0, rel=0.005)
    assert out.var() == pytest.approx(1000 * 0.02 * 0.98, rel=0.02)


def test_thin_binomial_large_counts_exact():
    out = thin_binomial(np.full(10, 10 ** 12), 0.5, RngStream(0, 1))
    assert np.all(out <= 10 ** 12) and out.dtype == np.int64


def test_pm_response():
    assert pm_response(7, DetectionParams(), None) == 7.0
    out = pm_response(np.full(50_000, 100), DetectionParams(pm_noise=0.1), RngStream(0, 2))
    assert np.all(out >= 0)
    assert out.std() == pytest.approx(10.0, rel=0.03)


@pytest.mark.parametrize("plus,minus,t,expected", [
    (10, 2, 5, OFOutcome.PLUS),
    (2, 10, 5, OFOutcome.MINUS),
    (7, 2, 5, OFOutcome.INCONCLUSIVE),  # equal to threshold is not accepted
    (3, 3, 0, OFOutcome.INCONCLUSIVE),
    (1, 0, 0, OFOutcome.PLUS),
])
def test_orthogonality_filter(plus, minus, t, expected):
    ev = DetectionEvent(plus, minus)
    assert orthogonality_filter(ev, t) is expected
    assert orthogonality_filter(ev.swapped(), t) == -expected
    assert orthogonality_filter_array([plus], [minus], t)[0] == expected


def test_filter_rejects_negative_threshold():
    with pytest.raises(ValueError):
        orthogonality_filter(DetectionEvent(1, 0), -1)
    with pytest.raises(ValueError):
        DetectionEvent(-1, 0)


@pytest.mark.parametrize("p,q,expected", [(1, 0, 1), (3, 8, 1), (0, 1, -1), (4, 3, -1)])
def test_ideal_parity(p, q, expected):
    assert ideal_parity_discriminator(FockOccupation(p, q)) == expected
    assert ideal_parity_array(np.array([p]))[0] == expected


@pytest.mark.parametrize("h,v,expected", [(2, 1, 1), (1, 2, -1), (2, 2, 0)])
def test_ideal_difference(h, v, expected):
    assert ideal_difference_discriminator(FockOccupation(h, v)) == expected
    assert ideal_difference_array([h], [v])[0] == expected


def test_expected_arm_signal():
    assert expected_arm_signal(100.0, 0.02) == pytest.approx(1.0)
