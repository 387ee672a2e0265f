"""Build script: compiles the optional simplex kernel extension when Cython
is available, otherwise installs the pure-Python package unchanged."""

import os

from setuptools import setup

try:
    if not os.path.exists("src/driftplan/_kernels_cy.pyx"):
        raise ImportError("kernel sources not present")
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "driftplan._kernels_cy",
                ["src/driftplan/_kernels_cy.pyx"],
                # contraction off: pivot sequences must match the numpy
                # backend bit for bit, so no FMA re-rounding
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:  # pragma: no cover - build-time branch
    print("warning: Cython not available, building without compiled kernels")
    extensions = []

setup(ext_modules=extensions)
