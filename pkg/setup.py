"""Build script.

The compiled kernel in src/coxmap/_speedups.pyx is optional: when Cython or a
C compiler is missing the install falls back to the pure-Python kernel that
ships alongside it.  Set COXMAP_PURE=1 to skip the extension on purpose.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise continue without it."""

    def run(self):
        try:
            build_ext.run(self)
        except Exception as exc:
            print("skipping compiled kernel (%s); using pure-Python fallback" % exc)

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except Exception as exc:
            print("skipping %s (%s); using pure-Python fallback" % (ext.name, exc))


ext_modules = []
if not os.environ.get("COXMAP_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/coxmap/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
