"""Pick the compiled kernels when available, else the pure-Python twin.

Set ``MFSTAB_BACKEND=python`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("MFSTAB_BACKEND", "").lower() == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
