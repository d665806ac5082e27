"""Selects numba-compiled kernels or their pure-numpy twins.

Set ``AOICOV_NO_NUMBA=1`` to force the numpy path (also used when numba is
not importable). The flag is read once, at import time.
"""

import os

_DISABLED = os.environ.get("AOICOV_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None

USE_NUMBA = _nb is not None and not _DISABLED


def njit(*args, **kwargs):
    if _nb is None:
        return lambda func: func
    return _nb.njit(*args, **kwargs)
