import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "famkit.kernels._native",
                ["src/famkit/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
else:
    # no Cython at build time: install the pure-numpy backend only
    ext_modules = []

setup(ext_modules=ext_modules)
