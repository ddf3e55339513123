"""numba switch.

Set ``BRANCHLAB_NO_NUMBA=1`` to run every kernel through its pure-numpy
fallback instead of the compiled loop.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("BRANCHLAB_NO_NUMBA", "").strip() in ("", "0")


def njit(fn):
    """Compile ``fn`` with numba in nopython mode when available, else return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn
