"""Kernel backend selection.

The compiled extension (``_ckernels``) is preferred when importable; the
numpy fallback (``py_kernels``) is used otherwise. ``MACROML_BACKEND`` can
force either: ``c`` (error if the extension is missing) or ``python``.
Both backends implement the same algorithms; compiled and pure results may
differ in the last floating-point digits.
"""

from __future__ import annotations

import os

from . import py_kernels

_requested = os.environ.get("MACROML_BACKEND", "auto").lower()
if _requested not in ("auto", "c", "python"):
    raise RuntimeError(f"MACROML_BACKEND must be auto|c|python, got {_requested!r}")

_impl = py_kernels
BACKEND = "python"
if _requested in ("auto", "c"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise RuntimeError(
                "MACROML_BACKEND=c but the compiled extension is not available"
            )

enet_cd = _impl.enet_cd
svr_smo = _impl.svr_smo
grow_tree = _impl.grow_tree
predict_tree = _impl.predict_tree


def get_backend() -> str:
    """Name of the active kernel backend, 'c' or 'python'."""
    return BACKEND


def backends() -> dict:
    """Mapping backend name -> module, only for backends that import."""
    out = {"python": py_kernels}
    try:
        from . import _ckernels

        out["c"] = _ckernels
    except ImportError:
        pass
    return out
