"""Backend selection for the hot kernels.

Kernels in ``_kernels`` exist in two functionally identical forms: a numba
``@njit`` build and a numpy/python build. Setting the environment variable
``TILTCOUPLE_DISABLE_NUMBA=1`` before import selects the fallback everywhere.
Both builds consume identical pre-drawn random blocks, so results match
across backends (bitwise for the sequential kernels).
"""

import os

DISABLE_ENV = "TILTCOUPLE_DISABLE_NUMBA"

NUMBA_ENABLED = os.environ.get(DISABLE_ENV, "").strip() not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        import numba  # noqa: F401
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False


def njit_or_none(**kwargs):
    """Return numba.njit(**kwargs) when the JIT backend is active, else None.

    Callers keep the pure-python reference implementation around either way;
    the dispatcher in ``_kernels`` decides which build to hand out.
    """
    if not NUMBA_ENABLED:
        return None
    import numba

    kwargs.setdefault("cache", True)
    return numba.njit(**kwargs)
