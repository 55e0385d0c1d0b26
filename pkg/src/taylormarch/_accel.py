"""Backend selection for the hot numerical kernels.

Two implementations of every kernel exist in :mod:`taylormarch.kernels`: a
numba ``@njit`` version and a pure-numpy version.  Which one is wired up is
decided once, at import time, from the ``TAYLORMARCH_NUMBA`` environment
variable:

* ``TAYLORMARCH_NUMBA=0`` forces the numpy path (useful for debugging and
  for benchmarking the fallback),
* ``TAYLORMARCH_NUMBA=1`` requires numba (ImportError if unavailable),
* unset/anything else: use numba when importable, numpy otherwise.
"""

from __future__ import annotations

import os


def _resolve() -> bool:
    flag = os.environ.get("TAYLORMARCH_NUMBA", "auto").strip().lower()
    if flag in ("0", "off", "false", "no"):
        return False
    if flag in ("1", "on", "true", "yes"):
        import numba  # noqa: F401  -- fail loudly if forced but missing

        return True
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED: bool = _resolve()

if NUMBA_ENABLED:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """No-op stand-in for numba.njit when running on the numpy path."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator
