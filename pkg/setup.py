"""Build script.

The assignment kernel (graphcf.ged._lsap_c) is an optional Cython extension;
when Cython or a C compiler is unavailable the package installs pure-Python
and graphcf.ged.lsap falls back to the interpreted solver at import time.
"""

import warnings

from setuptools import Extension, setup


def extension_modules():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; installing without the compiled assignment kernel")
        return []
    return cythonize(
        [Extension("graphcf.ged._lsap_c", ["src/graphcf/ged/_lsap_c.pyx"])],
        language_level="3",
    )


setup(ext_modules=extension_modules())
