"""Property-based checks of invariants that must hold for every input."""
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from micromacro.detection import DetectionEvent, OFOutcome, orthogonality_filter, thin_binomial
from micromacro.entanglement import bell_diagonal_state, minimal_v1, wootters_concurrence
from micromacro.macrostate import FockOccupation, PhiPerp, PhiPlus, make_gain, occupation_probability
from micromacro.rng import RngStream
from micromacro.sampling import AliceOutcome, conditional_mixture

signals = st.floats(0, 1e6, allow_nan=False)
phases = st.floats(-20, 20, allow_nan=False)


@given(signals, signals, st.floats(0, 1e3))
def test_filter_antisymmetric(a, b, t):
    ev = DetectionEvent(a, b)
    assert orthogonality_filter(ev.swapped(), t) == -orthogonality_filter(ev, t)


@given(signals, signals, st.floats(0, 1e3), st.floats(0, 1e3))
def test_filter_nested_acceptance(a, b, t1, t2):
    lo, hi = sorted((t1, t2))
    ev = DetectionEvent(a, b)
    if orthogonality_filter(ev, hi) is not OFOutcome.INCONCLUSIVE:
        assert orthogonality_filter(ev, lo) == orthogonality_filter(ev, hi)


@given(st.integers(0, 40), st.integers(0, 40), st.floats(0.01, 3))
def test_parity_support(p, q, g):
    prob = occupation_probability(PhiPlus(0.0), FockOccupation(p, q), make_gain(g))
    if not (p % 2 == 1 and q % 2 == 0):
        assert prob == 0.0
    else:
        assert 0 < prob <= 1
    assert prob == occupation_probability(PhiPerp(0.0), FockOccupation(q, p), make_gain(g))


@given(phases, phases)
def test_mixture_weights_complementary(a, b):
    plus = conditional_mixture(a, AliceOutcome.PLUS, b)
    perp = conditional_mixture(a, AliceOutcome.PERP, b)
    assert math.isclose(plus.w_parallel + plus.w_perp, 1.0, abs_tol=2e-16)
    assert math.isclose(plus.w_parallel, perp.w_perp, abs_tol=1e-15)
    # averaging over Alice's outcome leaves Bob's marginal unbiased
    assert math.isclose(0.5 * (plus.w_parallel + perp.w_parallel), 0.5, abs_tol=1e-15)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.floats(0, 1), st.integers(0, 2 ** 32))
def test_thinning_bounded(n, eta, seed):
    out = thin_binomial(np.array([n]), eta, RngStream(seed, 0))
    assert 0 <= out[0] <= n


@given(st.floats(0, 1), st.floats(0, 1))
def test_minimal_v1_state_is_physical(v2, v3):
    rho = bell_diagonal_state(minimal_v1(v2, v3), v2, v3)
    c = wootters_concurrence(rho)
    assert 0 <= c <= 1
    assert math.isclose(c, max(0.0, (minimal_v1(v2, v3) + v2 + v3 - 1) / 2), abs_tol=1e-9)
