from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython: install without the compiled kernel; the package falls
    # back to the pure-Python engine at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "wktrp._speedups",
                ["src/wktrp/_speedups.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
