import os

from setuptools import Extension, setup

extensions = []
if os.environ.get("FXRANGE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "fxrange.fixedpoint._kernel",
                    ["src/fxrange/fixedpoint/_kernel.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython: install pure-Python only, the fallback kernel is used.
        extensions = []

setup(ext_modules=extensions)
