"""Build hook: compiles the optional kernel extension when Cython is available.

The package is fully functional without the extension (the pure backend in
warelab._kernels.reference is selected at import time). Set WARELAB_NO_EXT=1
to skip compilation entirely, e.g. on hosts without a C toolchain.
"""

import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("WARELAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        ext_modules = []
    else:
        ext_modules = cythonize(
            ["src/warelab/_kernels/_speedups.pyx"],
            language_level=3,
        )
        if not sys.platform.startswith("win"):
            for ext in ext_modules:
                # the backends must stay bit-identical: FMA contraction
                # rounds a*b+c differently from CPython, and gcc's
                # sin+cos -> sincos fusion returns a cosine that can be
                # an ulp off glibc's discrete cos
                ext.extra_compile_args = [
                    "-ffp-contract=off",
                    "-fno-builtin-sincos",
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                ]

setup(ext_modules=ext_modules)
