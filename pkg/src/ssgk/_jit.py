"""Switch between numba-compiled kernels and their interpreted fallback.

Set ``SSGK_DISABLE_JIT=1`` before importing :mod:`ssgk` to run every hot
kernel as plain Python/numpy. The same source is used for both paths, so
results are bit-identical; only speed differs.
"""

import os

_FLAG = "SSGK_DISABLE_JIT"


def _jit_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not _jit_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise.

    Usable bare (``@njit``) or with options (``@njit(cache=True)``).
    """
    if args and callable(args[0]) and len(args) == 1 and not kwargs:
        return njit()(args[0])

    if not USE_NUMBA:
        def identity(func):
            return func
        return identity

    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "python"
