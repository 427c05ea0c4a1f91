"""Selects the trial kernel at import time.

The compiled Cython kernel is used when it was built; otherwise the NumPy
kernel in :mod:`pilotsense._rng`. Set ``PILOTSENSE_BACKEND=python`` to force
the fallback.
"""
from __future__ import annotations

import os

from . import _rng

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

KERNELS = {"python": _rng.fill_components}
if _kernels is not None:
    KERNELS["compiled"] = _kernels.fill_components


def _default() -> str:
    requested = os.environ.get("PILOTSENSE_BACKEND", "").strip().lower()
    if requested:
        if requested not in KERNELS:
            raise ImportError(
                f"PILOTSENSE_BACKEND={requested!r} unavailable; choose from {sorted(KERNELS)}")
        return requested
    return "compiled" if "compiled" in KERNELS else "python"


ACTIVE = _default()


def get_kernel(name: str | None = None):
    return KERNELS[name or ACTIVE]
