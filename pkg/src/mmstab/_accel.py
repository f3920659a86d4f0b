"""Optional numba acceleration for the hot kernels.

The jitted and plain paths run the same source. Setting the environment
variable ``MMSTAB_DISABLE_NUMBA=1`` (checked once, at import) forces the
pure numpy path; so does a missing numba installation. When numba is
active, the original Python function of a kernel remains reachable as
``fn.py_func`` (used by the benchmark to compare both paths).
"""

import os

DISABLE_ENV = "MMSTAB_DISABLE_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


NUMBA_ENABLED = False

if not _disabled_by_env():
    try:
        from numba import njit as _numba_njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if args and callable(args[0]):
            return _numba_njit(cache=kwargs["cache"])(args[0])
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        # Transparent stand-in: @njit and @njit(...) both return the
        # function unchanged, with py_func pointing at itself so callers
        # need not care which path is active.
        def wrap(fn):
            fn.py_func = fn
            return fn

        if args and callable(args[0]):
            return wrap(args[0])
        return wrap
