"""Builds the optional compiled kernel; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("HQS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("hqs._kernel", ["src/hqs/_kernel.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
