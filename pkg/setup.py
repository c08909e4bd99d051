import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "adlind._core._rk4_cy",
        ["src/adlind/_core/_rk4_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# The compiled stepper is optional: without Cython the package falls back to
# the pure-numpy implementation in adlind._core._rk4_py.
setup(ext_modules=cythonize(extensions, language_level=3) if cythonize else [])
