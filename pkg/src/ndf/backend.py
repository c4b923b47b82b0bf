"""Backend selection for the pairwise hot loops.

The package ships two interchangeable implementations of its O(N^2 t)
pairwise kernels: numba-compiled loops and a vectorized pure-numpy path.
The active one is chosen once at import time:

* ``NDF_BACKEND=numpy``  force the numpy path,
* ``NDF_BACKEND=numba``  require numba (ImportError if unavailable),
* unset                  numba when importable, numpy otherwise.
"""
from __future__ import annotations

import os

__all__ = ["ACTIVE_BACKEND", "HAS_NUMBA"]


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _select() -> str:
    choice = os.environ.get("NDF_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"NDF_BACKEND must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _numba_available():
            raise ImportError("NDF_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if _numba_available() else "numpy"


HAS_NUMBA = _numba_available()
ACTIVE_BACKEND = _select()
