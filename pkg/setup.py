import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "maninlab.kernels._ckernels",
    ["src/maninlab/kernels/_ckernels.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3"],
)
# The package falls back to the numpy kernels if the extension is missing,
# so a failed compile must not abort the install.
ext.optional = True

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}))
