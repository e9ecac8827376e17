from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("egflab._kernels", ["src/egflab/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # The package works without the compiled core; a pure-Python fallback
    # is selected at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
