"""Build script. The compiled stepping kernel is optional: if Cython or a C
compiler is unavailable (or YDECAY_NO_EXTENSION=1), the package installs with
the pure-Python kernel only and selects it at import time."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("YDECAY_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ydecay._stepper_cy",
                    ["src/ydecay/_stepper_cy.pyx"],
                    # -O2 without -ffast-math: keep IEEE semantics so both
                    # kernels produce matching trajectories.
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
