# Builds the optional compiled kernels. The package is fully functional
# without them (yieldcast.kernels falls back to the numpy implementations),
# so any failure here is demoted to a warning.
import warnings

from setuptools import setup

ext_modules = []
cmdclass = {}

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "yieldcast.kernels._fast",
                ["src/yieldcast/kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

    from setuptools.command.build_ext import build_ext

    class OptionalBuildExt(build_ext):
        def run(self):
            try:
                super().run()
            except Exception as exc:  # compiler missing, etc.
                warnings.warn(f"compiled kernels skipped: {exc}")

        def build_extension(self, ext):
            try:
                super().build_extension(ext)
            except Exception as exc:
                warnings.warn(f"compiled kernel {ext.name} skipped: {exc}")

    cmdclass["build_ext"] = OptionalBuildExt
except ImportError as exc:
    warnings.warn(f"Cython/numpy unavailable, building pure-python only: {exc}")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
