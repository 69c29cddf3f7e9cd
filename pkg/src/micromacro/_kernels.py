"""Hot inner loops, each with a numba and a pure-numpy implementation.

Both implementations of a kernel return identical results for identical
inputs; the public names bind to whichever backend ``_backend`` selected.
The ``*_numpy`` and ``*_numba`` names stay importable for benchmarks and
cross-backend tests.
"""
import numpy as np

from ._backend import HAS_NUMBA, USE_NUMBA

# Column order of the per-threshold tally produced by ``classify_counts``.
PP, PM, MP, MM, INCONCLUSIVE = range(5)


# --------------------------------------------------------------------------
# inverse-CDF lookup
# --------------------------------------------------------------------------

def cdf_lookup_numpy(cdf, targets):
    idx = np.searchsorted(cdf, targets, side="right")
    return np.minimum(idx, cdf.shape[0] - 1).astype(np.int64)


def _cdf_lookup_loop(cdf, targets):
    n = cdf.shape[0]
    out = np.empty(targets.shape[0], dtype=np.int64)
    for k in range(targets.shape[0]):
        t = targets[k]
        lo = 0
        hi = n
        # first index with cdf[idx] > t
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] > t:
                hi = mid
            else:
                lo = mid + 1
        out[k] = lo if lo < n else n - 1
    return out


# --------------------------------------------------------------------------
# orthogonality-filter tally over a set of thresholds
# --------------------------------------------------------------------------

def classify_counts_numpy(alice, det_plus, det_minus, thresholds, chunk=1 << 16):
    """Tally (pp, pm, mp, mm, inconclusive) and accepted signal sums per threshold.

    ``alice`` holds +1 / -1 for triggered trials and 0 for untriggered ones,
    which are skipped entirely.
    """
    thresholds = np.asarray(thresholds, dtype=np.float64)
    counts = np.zeros((thresholds.shape[0], 5), dtype=np.int64)
    sums = np.zeros(thresholds.shape[0], dtype=np.float64)
    for start in range(0, alice.shape[0], chunk):
        a = alice[start:start + chunk]
        keep = a != 0
        a = a[keep]
        dp = det_plus[start:start + chunk][keep]
        dm = det_minus[start:start + chunk][keep]
        diff = (dp - dm)[None, :]
        tot = (dp + dm)[None, :]
        t = thresholds[:, None]
        bob_plus = diff > t
        bob_minus = -diff > t
        a_plus = (a > 0)[None, :]
        a_minus = ~a_plus
        counts[:, PP] += np.count_nonzero(a_plus & bob_plus, axis=1)
        counts[:, PM] += np.count_nonzero(a_plus & bob_minus, axis=1)
        counts[:, MP] += np.count_nonzero(a_minus & bob_plus, axis=1)
        counts[:, MM] += np.count_nonzero(a_minus & bob_minus, axis=1)
        counts[:, INCONCLUSIVE] += np.count_nonzero(~(bob_plus | bob_minus), axis=1)
        sums += np.where(bob_plus | bob_minus, tot, 0.0).sum(axis=1)
    return counts, sums


def _classify_counts_loop(alice, det_plus, det_minus, thresholds):
    nt = thresholds.shape[0]
    counts = np.zeros((nt, 5), dtype=np.int64)
    sums = np.zeros(nt, dtype=np.float64)
    for k in range(alice.shape[0]):
        a = alice[k]
        if a == 0:
            continue
        diff = det_plus[k] - det_minus[k]
        tot = det_plus[k] + det_minus[k]
        for m in range(nt):
            t = thresholds[m]
            if diff > t:
                col = PP if a > 0 else MP
            elif -diff > t:
                col = PM if a > 0 else MM
            else:
                counts[m, INCONCLUSIVE] += 1
                continue
            counts[m, col] += 1
            sums[m] += tot
    return counts, sums


def classify_counts_numba(alice, det_plus, det_minus, thresholds):
    return _classify_counts_jit(alice, det_plus, det_minus,
                                np.asarray(thresholds, dtype=np.float64))


# --------------------------------------------------------------------------
# Fock-space representation of a two-mode passive transformation
# --------------------------------------------------------------------------

def mode_generator(a_h, a_v, b_h, b_v):
    """Hermitian G with exp(-iG) = [[a_h, b_h], [a_v, b_v]] (columns: images of H and V)."""
    from scipy.linalg import logm

    M = np.array([[a_h, b_h], [a_v, b_v]], dtype=np.complex128)
    if not np.allclose(M.conj().T @ M, np.eye(2), atol=1e-12):
        raise ValueError("mode transformation must be unitary")
    G = 1j * logm(M)
    return 0.5 * (G + G.conj().T)


def _sector_generator(n, g_hh, g_hv, g_vv):
    """Matrix of sum_kl G_kl a_k^+ a_l on the n-photon states |h, n - h>."""
    h = np.arange(n + 1, dtype=np.float64)
    out = np.zeros((n + 1, n + 1), dtype=np.complex128)
    for k in range(n + 1):
        out[k, k] = g_hh * h[k] + g_vv * (n - h[k])
    for k in range(n):
        # a_H^+ a_V : |k, n-k> -> sqrt((k+1)(n-k)) |k+1, n-k-1>
        c = np.sqrt((h[k] + 1.0) * (n - h[k]))
        out[k + 1, k] = g_hv * c
        out[k, k + 1] = np.conj(g_hv) * c
    return out


def rotation_sectors_numpy(cutoff, a_h, a_v, b_h, b_v):
    """Sector matrices U[n, h, p] of a two-mode passive linear map.

    Column ``p`` of sector ``n`` is the Fock state with ``p`` photons in the
    first rotated mode and ``n - p`` in the second, expanded over ``h``
    photons in H (and ``n - h`` in V).  The rotated creation operators are
    ``a_h a_H^+ + a_v a_V^+`` and ``b_h a_H^+ + b_v a_V^+``.

    Each sector is the exponential of the photon-number-conserving generator,
    formed from a Hermitian eigendecomposition so it stays unitary to
    rounding at any photon number.
    """
    G = mode_generator(a_h, a_v, b_h, b_v)
    return _sectors_from_generator_numpy(cutoff, G[0, 0], G[0, 1], G[1, 1])


def _sectors_from_generator_numpy(cutoff, g_hh, g_hv, g_vv):
    size = cutoff + 1
    U = np.zeros((size, size, size), dtype=np.complex128)
    for n in range(size):
        lam, W = np.linalg.eigh(_sector_generator(n, g_hh, g_hv, g_vv))
        U[n, :n + 1, :n + 1] = (W * np.exp(-1j * lam)) @ W.conj().T
    return U


def _sectors_from_generator_loop(cutoff, g_hh, g_hv, g_vv):
    size = cutoff + 1
    U = np.zeros((size, size, size), dtype=np.complex128)
    for n in range(size):
        lam, W = np.linalg.eigh(_sector_generator(n, g_hh, g_hv, g_vv))
        Wp = W * np.exp(-1j * lam)
        U[n, :n + 1, :n + 1] = Wp @ np.ascontiguousarray(W.conj().T)
    return U


if HAS_NUMBA:
    from numba import njit

    _cdf_lookup_jit = njit(cache=True, nogil=True)(_cdf_lookup_loop)
    _classify_counts_jit = njit(cache=True, nogil=True)(_classify_counts_loop)
    _sector_generator = njit(cache=True, nogil=True)(_sector_generator)
    _sectors_jit = njit(cache=True, nogil=True)(_sectors_from_generator_loop)

    def cdf_lookup_numba(cdf, targets):
        return _cdf_lookup_jit(cdf, targets)

    def rotation_sectors_numba(cutoff, a_h, a_v, b_h, b_v):
        G = mode_generator(a_h, a_v, b_h, b_v)
        return _sectors_jit(cutoff, float(G[0, 0].real), complex(G[0, 1]), float(G[1, 1].real))
else:  # pragma: no cover
    cdf_lookup_numba = cdf_lookup_numpy
    classify_counts_numba = classify_counts_numpy
    rotation_sectors_numba = rotation_sectors_numpy


if USE_NUMBA:
    cdf_lookup = cdf_lookup_numba
    classify_counts = classify_counts_numba
    rotation_sectors = rotation_sectors_numba
else:
    cdf_lookup = cdf_lookup_numpy
    classify_counts = classify_counts_numpy
    rotation_sectors = rotation_sectors_numpy
