import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the package falls back to numpy kernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "densecell._kernels",
                ["src/densecell/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
