"""Kernel backend selection.

Two implementations of the numeric hot paths exist: numba-compiled
kernels (the default when numba imports cleanly) and a pure-NumPy
fallback.  Set ``PEAKSCHED_BACKEND=numpy`` or ``=numba`` to force one.
The choice is made once, at import time; both backends return
bit-identical results, so the flag only affects speed.
"""

from __future__ import annotations

import os

_choice = os.environ.get("PEAKSCHED_BACKEND", "auto").strip().lower() or "auto"
if _choice not in {"auto", "numba", "numpy"}:
    raise ValueError(
        f"PEAKSCHED_BACKEND must be 'auto', 'numba', 'numpy' or unset, got {_choice!r}"
    )

if _choice == "numpy":
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"
elif _choice == "numba":
    from . import _kernels_numba as _impl

    BACKEND = "numba"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"

scenario_peaks = _impl.scenario_peaks
anneal = _impl.anneal
brute_search = _impl.brute_search
