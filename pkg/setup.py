"""Builds the optional compiled table-fill kernel.

The package works without it (a numpy fallback is selected at import), so
compilation problems downgrade to a warning instead of failing the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            warnings.warn(f"skipping compiled kernel: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping compiled kernel {ext.name}: {exc}")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "persuade._dp_core",
                ["src/persuade/_dp_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
