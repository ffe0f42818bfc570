"""Build script for the optional compiled kernels.

If Cython or a C compiler is missing the package still installs and runs on
the numpy fallback.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy  # noqa: F401

    ext_modules = cythonize(
        [
            Extension(
                "clarklab._ckernels",
                sources=["src/clarklab/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
