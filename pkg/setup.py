import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "thetasum._ckernels",
    sources=["src/thetasum/_ckernels.pyx"],
    include_dirs=[np.get_include(), "src/thetasum"],
    extra_compile_args=["-O3", "-fno-fast-math"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
