import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# VARLAB_NO_EXT=1 skips the compiled core; the package then runs on the numpy fallback.
if os.environ.get("VARLAB_NO_EXT"):
    ext_modules = []
else:
    extensions = [
        Extension(
            "varlab._kernels",
            ["src/varlab/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3", "-fopenmp", "-fno-trapping-math", "-fno-signed-zeros", "-ffinite-math-only"],
            extra_link_args=["-fopenmp"],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
