"""Build script for the optional compiled kernels.

The extension is optional: when Cython or a compiler is missing the package
installs without it and the pure-Python kernels are used instead.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("S2TOS_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        # No fast-math and no contraction: both backends must produce the
        # same bits for the same inputs. sin/cos must not be fused into
        # sincos, which rounds differently from the calls math.sin makes.
        ext_modules = cythonize(
            [
                Extension(
                    "s2tos._kernels._ckernels",
                    ["src/s2tos/_kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=[
                        "-O2",
                        "-ffp-contract=off",
                        "-fno-fast-math",
                        "-fno-builtin-sin",
                        "-fno-builtin-cos",
                    ],
                    language="c++",
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
