"""Kernel backend selection.

The compiled extension is used when importable; otherwise the pure-Python
reference kernels are used. Set ``OSCBOUND_PURE_PYTHON=1`` to force the
fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("OSCBOUND_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

integrate_resets = _impl.integrate_resets
violation_runs = _impl.violation_runs
max_excess = _impl.max_excess

__all__ = ["BACKEND", "integrate_resets", "violation_runs", "max_excess"]
