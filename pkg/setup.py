"""Build the optional compiled kernel; the package falls back to pure Python without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DUALIS_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "dualis._kernels",
                    ["src/dualis/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
