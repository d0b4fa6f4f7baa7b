"""Kernel acceleration switch.

Hot loops live in :mod:`tracelab._kernels` and are compiled with numba when
it is importable, unless ``TRACELAB_NUMBA=0`` requests the interpreted numpy
path. Both paths run the same source, so seeded integer results never depend
on the switch; only throughput does. Float-valued kernels agree across paths
to roundoff (the interpreted path may sum in a different order).
"""

from __future__ import annotations

import functools
import os

import numpy as np

_FALSY = ("0", "false", "off", "no")


def _env_wants_numba() -> bool:
    return os.environ.get("TRACELAB_NUMBA", "1").strip().lower() not in _FALSY


NUMBA_ENABLED = False
_njit = None
if _env_wants_numba():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def kernel(fn):
    """Decorator for kernel entry points.

    Compiled with ``@njit(cache=True)`` when numba is active. On the
    interpreted path the call runs under ``errstate(over="ignore")``:
    the RNG arithmetic wraps uint64 on purpose, and numpy scalars warn
    on wraparound where compiled code (and the C semantics it follows)
    does not.
    """
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)

    @functools.wraps(fn)
    def wrapper(*args):
        with np.errstate(over="ignore"):
            return fn(*args)

    return wrapper


def kernel_inner(fn):
    """Decorator for helpers only ever called from inside kernels.

    Same as :func:`kernel` under numba; left bare on the interpreted path
    so per-step calls skip the errstate context switch (the enclosing
    entry point already holds one).
    """
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn
