"""Kernel backend selection.

The compiled extension is preferred when importable; ECOL2_BACKEND forces
the choice ("compiled" or "python").  Forcing "compiled" on a build
without the extension is an error rather than a silent fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("ECOL2_BACKEND")

if _requested in (None, ""):
    kernels = _compiled if _compiled is not None else _kernels_py
elif _requested == "python":
    kernels = _kernels_py
elif _requested == "compiled":
    if _compiled is None:
        raise ImportError(
            "ECOL2_BACKEND=compiled but the compiled kernels are not built"
        )
    kernels = _compiled
else:
    raise ImportError(
        f"ECOL2_BACKEND must be 'compiled' or 'python', got {_requested!r}"
    )

BACKEND = "python" if kernels is _kernels_py else "compiled"


def available_backends() -> dict:
    """Importable kernel modules by name (for equivalence tests, benchmarks)."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
