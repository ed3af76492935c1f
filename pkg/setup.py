"""Build script for the optional compiled kernels.

The package is pure Python except for stmlib._kernels._ckernels, a small
Cython extension holding the admission-path kernels (cycle detection and
version selection).  If Cython or a C compiler is unavailable the build
falls back to the pure-Python kernels and the install still succeeds.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class optional_build_ext(build_ext):
    """Build the speedup extension, but never fail the install over it."""

    def run(self):
        try:
            build_ext.run(self)
        except (PlatformError, FileNotFoundError):
            self._warn()

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except (CCompilerError, ExecError, PlatformError, ValueError):
            self._warn()

    def _warn(self):
        print("WARNING: compiled kernels unavailable, using pure-Python fallback")


ext_modules = []
if not os.environ.get("STMLIB_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/stmlib/_kernels/_ckernels.pyx"], language_level=3
        )
    except ImportError:
        print("WARNING: Cython not installed, skipping compiled kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
