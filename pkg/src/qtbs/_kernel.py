"""Kernel selection: compiled solver when available, pure Python otherwise.

Set QTBS_PURE=1 to force the pure-Python kernel (used by the benchmark and
the parity tests).
"""
import os

from . import _kernel_py

if os.environ.get("QTBS_PURE"):
    _impl = _kernel_py
else:
    try:
        from . import _solve_kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

solve = _impl.solve
IMPLEMENTATION = _impl.IMPL_NAME
