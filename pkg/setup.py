import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FLUXCAV_PURE_BUILD"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fluxcav._kernels_cy",
                ["src/fluxcav/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
