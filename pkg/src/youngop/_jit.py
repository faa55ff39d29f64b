"""Optional numba acceleration.

Set ``YOUNGOP_DISABLE_JIT=1`` to run every kernel through its pure-numpy
implementation instead. The flag is read once, at import time.
"""
import os

_FLAG = os.environ.get("YOUNGOP_DISABLE_JIT", "").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

JIT_ENABLED = _numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` that always compiles when numba is importable.

    Kernels are compiled unconditionally so both paths remain testable in one
    process; ``JIT_ENABLED`` only decides which path the library dispatches to.
    """
    if _numba is None:  # pragma: no cover
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return _numba.njit(*args, **kwargs)


HAVE_NUMBA = _numba is not None
