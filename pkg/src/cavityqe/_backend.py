"""Kernel backend selection.

Imports the compiled extension when present and falls back to the pure
Python twins otherwise.  Override with the environment variable
``CAVITYQE_BACKEND``: ``python`` forces the fallback, ``compiled`` demands
the extension (raising if it is missing), empty or unset means "compiled
if available".
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("CAVITYQE_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
elif _requested in ("", "compiled"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "CAVITYQE_BACKEND=compiled but the cavityqe._kernels "
                "extension is not built"
            ) from None
        _impl = _kernels_py
        BACKEND = "python"
else:
    raise ValueError(
        f"CAVITYQE_BACKEND={_requested!r} not recognized; "
        "use 'python', 'compiled', or leave it unset"
    )

rk4_trajectory = _impl.rk4_trajectory
fourier_trapezoid = _impl.fourier_trapezoid
