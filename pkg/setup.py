"""Build hook: compiles the optional fast kernel extension.

The package is fully functional without the extension (a pure-Python twin
is selected at import time), so a failed build is downgraded to a warning.
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("conecrafter: Cython unavailable, building without the compiled kernel",
              file=sys.stderr)
        return []
    ext = Extension(
        "conecrafter._kernels._ckernels",
        ["src/conecrafter/_kernels/_ckernels.pyx"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
