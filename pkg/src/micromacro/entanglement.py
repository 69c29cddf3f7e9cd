"""Two-qubit states and the Wootters concurrence."""
from dataclasses import dataclass

import numpy as np

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Pauli operator measured in analysis basis 1 (H/V), 2 (R/L), 3 (+/-)
BASIS_PAULI = {1: SZ, 2: SY, 3: SX}

_YY = np.kron(SY, SY)


class NonPhysicalStateError(ValueError):
    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


@dataclass(frozen=True)
class TwoQubitDensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise NonPhysicalStateError("matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise NonPhysicalStateError(f"trace is {np.trace(m).real:.15g}, not 1")
        ev = np.linalg.eigvalsh(m)
        if ev[0] < -1e-10:
            raise NonPhysicalStateError(
                f"matrix has negative eigenvalues {ev[ev < -1e-10]}", ev)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def correlation(self, basis: int) -> float:
        """<sigma_i (x) sigma_i> for analysis basis i."""
        s = BASIS_PAULI[basis]
        return float(np.trace(self.matrix @ np.kron(s, s)).real)


def bell_diagonal_state(v1: float, v2: float, v3: float) -> TwoQubitDensityMatrix:
    """(1/4)(I + sum_i t_i sigma_i (x) sigma_i) with singlet-type t_i = -v_i."""
    vs = (v1, v2, v3)
    if any(not 0.0 <= v <= 1.0 for v in vs):
        raise ValueError(f"visibilities must lie in [0, 1], got {vs}")
    rho = np.kron(I2, I2).astype(np.complex128)
    for basis, v in zip((1, 2, 3), vs):
        s = BASIS_PAULI[basis]
        rho = rho - v * np.kron(s, s)
    rho = rho / 4.0
    ev = np.linalg.eigvalsh(rho)
    if ev[0] < -1e-10:
        raise NonPhysicalStateError(
            f"visibilities {vs} give a non-physical Bell-diagonal matrix; eigenvalues {ev}", ev)
    return TwoQubitDensityMatrix(rho)


def minimal_v1(v2: float, v3: float) -> float:
    """Smallest basis-1 visibility compatible with a physical state given v2, v3.

    Positivity of the Bell-diagonal matrix requires v2 + v3 <= 1 + v1.
    """
    return max(0.0, v2 + v3 - 1.0)


def wootters_concurrence(rho: TwoQubitDensityMatrix) -> float:
    """max(0, l1 - l2 - l3 - l4) over the square-rooted eigenvalues of rho rho~.

    Computed as the singular values of tau_kl = v_k^T (sy x sy) v_l with
    v_k the subnormalised eigenvectors of rho, which avoids square roots of
    round-off-sized eigenvalues.
    """
    w, U = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    V = U * np.sqrt(w)[None, :]
    tau = V.T @ _YY @ V
    lam = np.linalg.svd(tau, compute_uv=False)
    lam = np.sort(lam)[::-1]
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(1.0, max(0.0, c)))


def singlet() -> TwoQubitDensityMatrix:
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0)
    return TwoQubitDensityMatrix(np.outer(psi, psi.conj()))


def werner_state(p: float) -> TwoQubitDensityMatrix:
    return TwoQubitDensityMatrix(p * singlet().matrix + (1.0 - p) / 4.0 * np.eye(4))


def product_state(a, b) -> TwoQubitDensityMatrix:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    return TwoQubitDensityMatrix(np.outer(psi, psi.conj()))
