"""Backend selector for the F_p reduction kernels.

Tries the compiled extension first and falls back to the pure-Python twin.
Set MULTIPRES_PURE=1 to force the fallback (used by tests and benchmarks to
exercise both paths).
"""

from __future__ import annotations

import os

from . import _fp_core as _pure

if os.environ.get("MULTIPRES_PURE"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _fp_core_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

reduce_pivots = _impl.reduce_pivots
echelonize = _impl.echelonize
rank = _impl.rank
residual = _impl.residual


def backends():
    """All importable backends, name -> module (for benchmarks and tests)."""
    found = {"pure": _pure}
    try:
        from . import _fp_core_cy  # type: ignore[attr-defined]

        found["compiled"] = _fp_core_cy
    except ImportError:
        pass
    return found
