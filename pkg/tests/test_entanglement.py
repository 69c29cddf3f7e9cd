import numpy as np
import pytest

from micromacro.entanglement import (
    NonPhysicalStateError,
    TwoQubitDensityMatrix,
    bell_diagonal_state,
    minimal_v1,
    product_state,
    singlet,
    werner_state,
    wootters_concurrence,
)


def test_singlet_and_product():
    assert wootters_concurrence(singlet()) == pytest.approx(1.0, abs=1e-12)
    assert wootters_concurrence(product_state([1, 0], [1, 1j])) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.4, 0.8, 1.0])
def test_werner(p):
    assert wootters_concurrence(werner_state(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-9)


@pytest.mark.parametrize("basis", [1, 2, 3])
def test_singlet_correlations(basis):
    assert singlet().correlation(basis) == pytest.approx(-1.0)


@pytest.mark.parametrize("v", [(1, 1, 1), (0.2, 0.3, 0.4), (0.5, 0.54, 0.55)])
def test_bell_diagonal_correlations(v):
    rho = bell_diagonal_state(*v)
    for b, vb in zip((1, 2, 3), v):
        assert -rho.correlation(b) == pytest.approx(vb)


def test_bell_diagonal_concurrence_formula():
    # for Bell-diagonal states C = max(0, (V1 + V2 + V3 - 1) / 2)
    for v in [(0.2, 0.3, 0.4), (0.6, 0.7, 0.8), (1, 1, 1)]:
        assert wootters_concurrence(bell_diagonal_state(*v)) == pytest.approx(max(0, (sum(v) - 1) / 2), abs=1e-9)


def test_nonphysical_bell_diagonal_rejected():
    with pytest.raises(NonPhysicalStateError) as err:
        bell_diagonal_state(0.0, 0.54, 0.55)
    assert min(err.value.eigenvalues) == pytest.approx(-0.0225)


def test_minimal_v1():
    assert minimal_v1(0.54, 0.55) == pytest.approx(0.09)
    assert minimal_v1(0.3, 0.3) == 0.0
    rho = bell_diagonal_state(minimal_v1(0.54, 0.55), 0.54, 0.55)
    assert wootters_concurrence(rho) == pytest.approx(0.09, abs=1e-12)


@pytest.mark.parametrize("m", [
    np.diag([0.5, 0.5, 0, 0.1]),                # trace
    np.array([[0.5, 1j, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),  # not Hermitian
    np.diag([1.2, -0.2, 0, 0]),                 # negative
    np.eye(3) / 3,                              # shape
])
def test_density_matrix_validation(m):
    with pytest.raises(ValueError):
        TwoQubitDensityMatrix(m)
