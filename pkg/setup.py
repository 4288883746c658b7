import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BACKFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "backflow._jacobi",
                    ["src/backflow/_jacobi.pyx"],
                    extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython: install the pure-Python package; the fallback
        # eigensolver is selected automatically at import.
        ext_modules = []

setup(ext_modules=ext_modules)
