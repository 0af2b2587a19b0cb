import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RECOILSHIFT_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "recoilshift._kernels",
                ["src/recoilshift/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        # no Cython or numpy at build time: ship the pure-python kernels only
        ext_modules = []

setup(ext_modules=ext_modules)
