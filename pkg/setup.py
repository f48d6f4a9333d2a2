"""Build script: compiles the optional C kernel extension when Cython is available.

The package is fully functional without the extension (a numpy fallback is
selected at import time); building it is strongly recommended for spaces
beyond ~50 points.  `python setup.py build_ext --inplace` drops the shared
object next to the pure-Python kernels.
"""
import os

from setuptools import Extension, setup

PYX = "src/hajlasz/_kernels/_ckern.pyx"

ext_modules = []
try:
    if not os.path.exists(PYX):
        raise ImportError
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "hajlasz._kernels._ckern",
        [PYX],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
