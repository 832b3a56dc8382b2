"""Optional numba acceleration.

Set ``TRIAD_DISABLE_JIT=1`` to force the pure-numpy kernels (also used when
numba is not importable).
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_DISABLED = numba is None or os.environ.get("TRIAD_DISABLE_JIT", "").lower() not in ("", "0", "false", "no")


def njit(*args, **kwargs):
    if numba is None:
        return lambda func: func
    return numba.njit(*args, **kwargs)
