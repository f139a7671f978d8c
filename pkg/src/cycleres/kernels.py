"""Kernel backend selection.

The compiled extension is used when importable; otherwise the numpy fallback.
Set CYCLERES_BACKEND=c|python to force one (forcing `c` without a built
extension raises at import).
"""
from __future__ import annotations

import os


def _load(name: str):
    if name == "c":
        from . import _kernels
        return _kernels
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list:
    names = []
    try:
        _load("c")
        names.append("c")
    except ImportError:
        pass
    names.append("python")
    return names


_requested = os.environ.get("CYCLERES_BACKEND", "auto").strip().lower() or "auto"
if _requested == "auto":
    try:
        active = _load("c")
    except ImportError:
        active = _load("python")
elif _requested in ("c", "compiled"):
    active = _load("c")
elif _requested in ("py", "python"):
    active = _load("python")
else:
    raise ValueError(f"CYCLERES_BACKEND={_requested!r} not recognized (use c or python)")


def backend_name() -> str:
    return active.NAME
