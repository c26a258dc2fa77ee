"""Kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is missing or when RLWS_BACKEND=python is set.  Both expose the
same functions with identical arithmetic.
"""
import os

from . import _kernels_py

if os.environ.get("RLWS_BACKEND", "").lower() == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
