"""Kernel backend selection.

The compiled Cython module is preferred; the numpy implementation is the
fallback.  Set ``QAOALAB_BACKEND=numpy`` or ``QAOALAB_BACKEND=cython`` to
force a choice (forcing cython raises if the extension is missing).
"""

import os

from . import dense as _numpy_backend

_requested = os.environ.get("QAOALAB_BACKEND", "").strip().lower()

if _requested == "numpy":
    _impl = _numpy_backend
else:
    try:
        from . import _fast as _impl
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "QAOALAB_BACKEND=cython but the compiled extension is not "
                "available; reinstall the package or drop the override"
            )
        _impl = _numpy_backend

BACKEND = _impl.BACKEND

zz_parity_sum = _impl.zz_parity_sum
phase_apply = _impl.phase_apply
zz_phase = _impl.zz_phase
x_field = _impl.x_field
xy_pair = _impl.xy_pair
lindblad_rhs = _impl.lindblad_rhs


def get_backend(name):
    """Return a specific backend module (for benchmarks and tests)."""
    if name == "numpy":
        return _numpy_backend
    if name == "cython":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")
