import os

from setuptools import Extension, setup

# the compiled kernel is optional: without Cython or a compiler the package
# falls back to the numpy implementation at import time
ext_modules = []
if os.environ.get("SPECGAMES_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
        import numpy as np
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("specgames.kernels._fast", ["src/specgames/kernels/_fast.pyx"],
                       include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
