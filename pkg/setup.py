import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "spflab.linalg._fastgf",
                ["src/spflab/linalg/_fastgf.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python kernels are selected at import time when the compiled
    # extension is unavailable.
    extensions = []

setup(ext_modules=extensions)
