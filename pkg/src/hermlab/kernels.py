"""Kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the numpy
fallback. ``HERMLAB_PURE=1`` in the environment forces the fallback (used by
the benchmark and by tests that check backend equivalence).
"""

import os

if os.environ.get("HERMLAB_PURE") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
hermite_function_table = _impl.hermite_function_table
greedy_ball_select = _impl.greedy_ball_select

__all__ = ["BACKEND", "hermite_function_table", "greedy_ball_select"]
