"""Builds the optional compiled solver kernel.

The package is fully functional without the extension: `timeline_contest.backends`
falls back to the pure-Python kernel when `timeline_contest._fast` is missing.
Set TIMELINE_CONTEST_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("TIMELINE_CONTEST_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "timeline_contest._fast",
        ["src/timeline_contest/_fast.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
