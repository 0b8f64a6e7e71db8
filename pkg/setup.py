import numpy
from setuptools import setup, Extension
from Cython.Build import cythonize

ext = Extension(
    "qf3delta._speedups",
    ["src/qf3delta/_speedups.pyx"],
    include_dirs=[numpy.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
