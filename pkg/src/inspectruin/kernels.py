"""Backend selection for the random-walk kernel.

The compiled extension is used when importable; ``INSPECTRUIN_BACKEND=python``
forces the pure-Python fallback.
"""
import os

from . import _kernels_py

python_walk = _kernels_py.walk

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

compiled_walk = _compiled.walk if _compiled is not None else None

if os.environ.get("INSPECTRUIN_BACKEND", "").lower() == "python" or _compiled is None:
    walk = python_walk
    BACKEND = "python"
else:
    walk = compiled_walk
    BACKEND = "cython"
