import os

from setuptools import Extension, setup

extensions = []
if os.environ.get("SUBMINIMAL_PURE") != "1":
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "subminimal.kernels._core",
                    ["src/subminimal/kernels/_core.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        # No Cython available: install with the pure-Python kernels only.
        extensions = []

setup(ext_modules=extensions)
