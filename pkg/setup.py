"""Builds the optional Cython trial kernel.

If Cython or a C compiler is unavailable the extension is skipped and
``pilotsense`` falls back to its NumPy kernel at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "pilotsense._kernels",
                ["src/pilotsense/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
