"""Build script: compiles the optional bit-kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); the compiled core is a significant speedup for packing and
spanning-tree experiments at the larger problem sizes.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "shallowpack._ckernels",
                ["src/shallowpack/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
