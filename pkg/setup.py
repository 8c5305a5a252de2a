"""Build script: compiles the optional Cython chain kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile degrades to a warning instead of aborting
the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/oball/montecarlo/_chain_cy.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython kernel not built ({exc}); using pure-Python fallback")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
