import numpy
from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to pure
# numpy/matplotlib implementations when morseflow._fast is missing.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "morseflow._fast",
                ["src/morseflow/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
