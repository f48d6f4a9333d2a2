"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set HAJLASZ_BACKEND=python to force the fallback, HAJLASZ_BACKEND=c to demand
the compiled module (ImportError if it was not built).
"""
from __future__ import annotations

import os

_choice = os.environ.get("HAJLASZ_BACKEND", "auto").strip().lower()

if _choice in ("python", "py", "pure"):
    from . import _pykern as _impl

    BACKEND = "python"
elif _choice in ("auto", "", "c"):
    try:
        from . import _ckern as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        from . import _pykern as _impl

        BACKEND = "python"
else:
    raise RuntimeError(f"unknown HAJLASZ_BACKEND value: {_choice!r}")

ball_scan_sharp = _impl.ball_scan_sharp
ball_scan_hl = _impl.ball_scan_hl
ball_scan_minh = _impl.ball_scan_minh
pair_project = _impl.pair_project
pair_exchange = _impl.pair_exchange
pair_dual_sweep = _impl.pair_dual_sweep
ball_dual_sweep = _impl.ball_dual_sweep
ball_project = _impl.ball_project
