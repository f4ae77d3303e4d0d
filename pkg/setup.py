import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install, kernels fall back at import
    cythonize = None

_npy_root = os.path.dirname(np.__file__)

ext_modules = []
if cythonize is not None and os.environ.get("INSPECTRUIN_NO_EXT") != "1":
    ext = Extension(
        "inspectruin._kernels",
        ["src/inspectruin/_kernels.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[os.path.join(_npy_root, "random", "lib")],
        libraries=["npyrandom", "m"],
        # bit-identical with the fallback requires no FMA contraction
        extra_compile_args=["-O2", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
