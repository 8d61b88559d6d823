"""Hot-kernel backend selection.

The numba backend is used when available; set ``DYNEMBED_NO_NUMBA=1`` to
force the pure-Python/numpy fallback (same results, slower). The active
backend name is exposed as ``BACKEND``.
"""

from __future__ import annotations

import os

from ._python import UNREACHED

if os.environ.get("DYNEMBED_NO_NUMBA", "").strip() not in ("", "0"):
    BACKEND = "python"
else:
    try:
        from . import _numba  # noqa: F401

        BACKEND = "numba"
    except ImportError:
        BACKEND = "python"

if BACKEND == "numba":
    from ._numba import all_pairs, carve, dijkstra
else:
    from ._python import all_pairs, carve, dijkstra

__all__ = ["BACKEND", "UNREACHED", "all_pairs", "carve", "dijkstra"]
