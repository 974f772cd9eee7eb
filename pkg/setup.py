# Builds the optional compiled kernel module. A plain `pip install .` without
# Cython (or without a C compiler) still works: the package falls back to the
# pure-numpy kernels at import time.
#
# In-place build for development:  python setup.py build_ext --inplace
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "sparselad._kernels._fast",
                ["src/sparselad/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
