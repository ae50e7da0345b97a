"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so any build failure here downgrades to a source-only
install instead of aborting.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pseudoparab._kernels_cy",
                ["src/pseudoparab/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
