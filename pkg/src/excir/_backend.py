"""Kernel backend selection.

The compiled extension is preferred; set ``EXCIR_PURE_PYTHON=1`` to force
the numpy fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if os.environ.get("EXCIR_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _pykernels
else:
    kernels = _compiled or _pykernels

BACKEND = "cython" if kernels is _compiled else "python"

accumulate = kernels.accumulate
GKSketch = kernels.GKSketch
