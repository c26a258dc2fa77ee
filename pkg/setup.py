"""Builds the optional compiled kernel extension.

The package works without it (a pure-Python fallback is selected at import
time), so a missing C toolchain only costs speed, not functionality.
"""
import os

from setuptools import Extension, setup

ext_modules = []
try:
    if not os.path.exists("src/rlws/_kernels.pyx"):
        raise ImportError("no kernel source")
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rlws._kernels",
                ["src/rlws/_kernels.pyx"],
                # -ffp-contract=off keeps the C arithmetic bit-identical to the
                # pure-Python kernels (no FMA contraction), which the backend
                # parity tests rely on.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
