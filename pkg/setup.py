"""Build script: compiles the native kernel extension when a toolchain is
available.  Set PROJRES_SKIP_NATIVE=1 to force a pure-Python install."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PROJRES_SKIP_NATIVE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "projres.kernels._native",
                    ["src/projres/kernels/_native.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython on the build host: the package still works, kernels fall
        # back to the numpy implementations at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
