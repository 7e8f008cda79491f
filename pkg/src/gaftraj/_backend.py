"""Kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to the
numpy implementations otherwise. GAFTRAJ_PURE_PYTHON=1 forces the fallback
(used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GAFTRAJ_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = _kernels_py
        COMPILED = False

GAF_SUMMATION = _kernels_py.GAF_SUMMATION
GAF_DIFFERENCE = _kernels_py.GAF_DIFFERENCE

step_sample = _impl.step_sample
ramp_sample = _impl.ramp_sample
gaf_batch = _impl.gaf_batch


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
