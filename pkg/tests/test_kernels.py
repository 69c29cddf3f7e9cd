import math

import numpy as np
import pytest

from micromacro import _kernels
from micromacro._backend import HAS_NUMBA

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


@needs_numba
def test_cdf_lookup_backends_agree():
    rng = np.random.default_rng(0)
    cdf = np.cumsum(rng.random(500))
    cdf /= cdf[-1]
    u = np.concatenate([rng.random(10_000), cdf[:20], [0.0, 1.0]])
    a = _kernels.cdf_lookup_numpy(cdf, u)
    b = _kernels.cdf_lookup_numba(cdf, u)
    np.testing.assert_array_equal(a, b)
    # first index whose cdf exceeds the target
    assert a[-2] == 0 and a[-1] == cdf.size - 1


@needs_numba
def test_classify_counts_backends_agree():
    rng = np.random.default_rng(1)
    n = 50_000
    alice = rng.choice(np.array([-1, 1, 0], dtype=np.int8), n)
    dp = rng.poisson(20, n).astype(np.float64)
    dm = rng.poisson(20, n).astype(np.float64)
    thr = np.array([0.0, 3.0, 10.0])
    c1, s1 = _kernels.classify_counts_numpy(alice, dp, dm, thr)
    c2, s2 = _kernels.classify_counts_numba(alice, dp, dm, thr)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_allclose(s1, s2, rtol=1e-12)
    assert c1.shape == (3, 5)
    assert np.all(c1.sum(axis=1) == (alice != 0).sum())


def test_classify_counts_matches_definition():
    alice = np.array([1, 1, -1, -1, 1, 0], dtype=np.int8)
    dp = np.array([10, 0, 10, 0, 5, 10], dtype=np.float64)
    dm = np.array([0, 10, 0, 10, 5, 0], dtype=np.float64)
    counts, acc = _kernels.classify_counts(alice, dp, dm, np.array([1.0]))
    assert counts[0].tolist() == [1, 1, 1, 1, 1]
    assert acc[0] == 40.0


@needs_numba
@pytest.mark.parametrize("phase", [0.0, 0.9, 1.5 * math.pi])
def test_rotation_backends_agree(phase):
    e = complex(math.cos(phase), math.sin(phase))
    s = 1 / math.sqrt(2)
    a = _kernels.rotation_sectors_numpy(25, s, s * e, s, -s * e)
    b = _kernels.rotation_sectors_numba(25, s, s * e, s, -s * e)
    np.testing.assert_allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("n", [1, 4, 15])
def test_rotation_sector_is_unitary(n):
    s = 1 / math.sqrt(2)
    U = _kernels.rotation_sectors(20, s, s * 1j, s, -s * 1j)
    block = U[n, :n + 1, :n + 1]
    np.testing.assert_allclose(block.conj().T @ block, np.eye(n + 1), atol=1e-12)


def test_env_flag_selects_numpy_backend_with_identical_results():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json, math;"
        "from micromacro import backend_name;"
        "from micromacro.experiment import ExperimentConfig, run_pool;"
        "from micromacro.detection import DetectionParams;"
        "from micromacro.macrostate import make_gain;"
        "cfg = ExperimentConfig(gain=make_gain(2.0), detection=DetectionParams(eta_B=0.3),"
        " phi_A_list=(0.0, 1.0), trials=30000, threshold_multiple=3.0, seed=8);"
        "p = run_pool(cfg);"
        "print(json.dumps([backend_name(), [c.as_tuple() for c in p.counts[0]]]))"
    )
    out = {}
    for flag in ("numpy", "numba"):
        env = {**os.environ, "MICROMACRO_BACKEND": flag}
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[flag] = json.loads(res.stdout)
    assert out["numpy"][0] == "numpy"
    if HAS_NUMBA:
        assert out["numba"][0] == "numba"
    assert out["numpy"][1] == out["numba"][1]


def brute_sector(n, a_h, a_v, b_h, b_v):
    """Expand (A^+)^p (B^+)^(n-p) |0> / sqrt(p! (n-p)!) by the binomial theorem."""
    from math import comb, factorial, sqrt

    U = np.zeros((n + 1, n + 1), complex)
    for p in range(n + 1):
        q = n - p
        for k in range(p + 1):
            for m in range(q + 1):
                h = k + m
                coeff = comb(p, k) * comb(q, m) * a_h ** k * a_v ** (p - k) * b_h ** m * b_v ** (q - m)
                U[h, p] += coeff * sqrt(factorial(h) * factorial(n - h)) / sqrt(factorial(p) * factorial(q))
    return U


@pytest.mark.parametrize("phase", [0.0, 0.9, 1.5 * math.pi])
def test_rotation_matches_binomial_expansion(phase):
    e = complex(math.cos(phase), math.sin(phase))
    s = 1 / math.sqrt(2)
    U = _kernels.rotation_sectors(12, s, s * e, s, -s * e)
    for n in (1, 5, 12):
        np.testing.assert_allclose(U[n, :n + 1, :n + 1], brute_sector(n, s, s * e, s, -s * e), atol=1e-12)


def test_rotation_unitary_at_high_photon_number():
    s = 1 / math.sqrt(2)
    U = _kernels.rotation_sectors(150, s, s * 1j, s, -s * 1j)
    for n in (60, 100, 150):
        block = U[n, :n + 1, :n + 1]
        np.testing.assert_allclose(block.conj().T @ block, np.eye(n + 1), atol=1e-12)


def test_rotation_rejects_non_unitary():
    with pytest.raises(ValueError):
        _kernels.rotation_sectors(3, 1.0, 1.0, 0.0, 1.0)
