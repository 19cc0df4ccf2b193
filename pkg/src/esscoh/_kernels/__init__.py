"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is selected when
the extension is missing or when ESSCOH_KERNEL=python is set.  Both
expose the same two primitives (rref_inplace, mask_matmul) on the shared
packed layout.
"""

from __future__ import annotations

import os
import sys

from . import _gf2_py


def _pick():
    choice = os.environ.get("ESSCOH_KERNEL", "").lower()
    if choice in ("python", "py"):
        return _gf2_py
    if sys.byteorder != "little":
        # Packed layout assumes little-endian uint64 views.
        return _gf2_py
    try:
        from . import _gf2
        return _gf2
    except ImportError:
        if choice in ("compiled", "cy", "c"):
            raise
        return _gf2_py


_impl = _pick()

BACKEND = _impl.BACKEND
rref_inplace = _impl.rref_inplace
mask_matmul = _impl.mask_matmul

__all__ = ["BACKEND", "rref_inplace", "mask_matmul"]
