"""Build script for the optional compiled kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so any failure to cythonize or compile downgrades the build
to pure Python instead of aborting it.
"""

import os

from setuptools import Extension, setup


def extension_modules():
    if os.environ.get("CAVITYQE_NO_EXTENSION"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "cavityqe._kernels",
        sources=["src/cavityqe/_kernels.pyx"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extension_modules())
