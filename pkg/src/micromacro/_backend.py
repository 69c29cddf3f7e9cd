"""Kernel backend selection.

Set ``MICROMACRO_BACKEND=numpy`` to force the pure-numpy code paths even when
numba is importable.  Any other value (or unset) uses numba when available.
"""
import os

BACKEND_ENV = "MICROMACRO_BACKEND"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get(BACKEND_ENV, "numba").lower() != "numpy"


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
