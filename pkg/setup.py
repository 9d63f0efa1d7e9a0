"""Build script: compiles the optional C acceleration kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed or skipped compilation is not fatal.  Set
OWLREG_SKIP_EXTENSION=1 to force a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("OWLREG_SKIP_EXTENSION"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("owlreg._pav", ["src/owlreg/_pav.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
