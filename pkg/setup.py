import sys

from setuptools import Extension, setup

# The compiled kernels are an optional speedup: if Cython or a C compiler is
# unavailable the package installs anyway and falls back to the pure-Python
# implementations in macroml._backend.py_kernels.
ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext = Extension(
        "macroml._backend._ckernels",
        ["src/macroml/_backend/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"macroml: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
