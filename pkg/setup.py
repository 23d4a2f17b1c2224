from setuptools import Extension, setup

# -ffp-contract=off keeps the C kernels bit-identical to the pure-Python
# fallback (no fused multiply-add); the package works without the extension,
# falling back to groversim._kernels_py at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "groversim._kernels",
                ["src/groversim/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
