import os

from setuptools import Extension, setup

# The compiled kernels are an optional accelerator: the package falls back to
# the pure numpy implementation when the extension is absent.  Set
# IMCERGO_NO_EXT=1 to skip building it.
ext_modules = []
if os.environ.get("IMCERGO_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "imcergo._speedups",
                    ["src/imcergo/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
