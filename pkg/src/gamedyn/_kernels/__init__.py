"""Backend selection for the hot kernels.

`GAMEDYN_BACKEND` picks the implementation: "cython" requires the compiled
extension, "python" forces the numpy fallback, "auto" (default) prefers the
extension and silently falls back.  `get_backend()` returns the module in
use; everything above this package goes through it.
"""

from __future__ import annotations

import os

from . import pyfallback


def _load(name: str):
    if name == "python":
        return pyfallback
    try:
        from . import _core
    except ImportError:
        if name == "cython":
            raise ImportError(
                "GAMEDYN_BACKEND=cython but the compiled extension is not "
                "available; build it or unset the variable") from None
        return pyfallback
    return _core


_choice = os.environ.get("GAMEDYN_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "python", "cython"):
    raise ImportError(f"unrecognized GAMEDYN_BACKEND value: {_choice!r}")

_active = _load(_choice)


def get_backend():
    """Module providing the kernel functions selected at import time."""
    return _active


def backend_name() -> str:
    return _active.BACKEND_NAME
