"""Kernel backend selection.

The compiled module is used when it was built. Setting S2TOS_BACKEND=python
forces the pure-Python kernels; S2TOS_BACKEND=cython makes a missing
extension an import error instead of a silent fallback.
"""

from __future__ import annotations

import os

from . import _pykernels as python_kernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

_choice = os.environ.get("S2TOS_BACKEND", "").strip().lower()
if _choice == "python":
    kernels = python_kernels
elif _choice == "cython":
    if compiled_kernels is None:
        raise ImportError("S2TOS_BACKEND=cython but the compiled kernels are not built")
    kernels = compiled_kernels
else:
    kernels = compiled_kernels if compiled_kernels is not None else python_kernels

BACKEND = kernels.BACKEND


def get(name: str):
    """Kernel module by backend name ('python' or 'cython')."""
    if name == "python":
        return python_kernels
    if name == "cython":
        if compiled_kernels is None:
            raise ImportError("compiled kernels are not built")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
