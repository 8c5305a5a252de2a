"""Kernel backend selection at import time.

The compiled Cython kernel is preferred; the pure-Python mirror is the
fallback when the extension is unavailable (or when OBALL_FORCE_PYTHON is
set, which the benchmark and the equivalence test use).
"""

from __future__ import annotations

import os

from . import _chain_py

if os.environ.get("OBALL_FORCE_PYTHON"):
    _impl = _chain_py
else:
    try:
        from . import _chain_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _chain_py

advance = _impl.advance
BACKEND_NAME = _impl.BACKEND_NAME


def backend_name() -> str:
    """Which chain kernel this process selected ('cython' or 'python')."""
    return BACKEND_NAME
