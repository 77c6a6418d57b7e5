"""Build script: compiles the optional text-kernel extension.

The package runs without it (a pure-Python kernel is selected at import
time), so any failure to cythonize or compile degrades to a pure
install.  Set CHAIRKIT_NO_EXTENSION=1 to skip the extension outright.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CHAIRKIT_NO_EXTENSION", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/chairkit/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
