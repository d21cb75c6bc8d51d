"""Kernel selection: compiled extension when present, pure Python otherwise.

Set ITTOPO_PURE_PYTHON=1 to force the fallback (used by tests and the
benchmark)."""
import os

if os.environ.get("ITTOPO_PURE_PYTHON"):
    from . import _core_py as impl
    BACKEND = "python"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as impl
        BACKEND = "python"

uf_pairs = impl.uf_pairs
reduce_cols = impl.reduce_cols
center_accumulate = impl.center_accumulate
