# Build the optional compiled kernels:
#     pip install -e . --no-build-isolation
# or  python setup.py build_ext --inplace
# If the extension fails to build, the package falls back to numpy kernels.
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
                "definetti._kernels",
                sources=["src/definetti/_kernels.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
