"""Builds the extension through the project's CMake tree.

The compiled module is produced by the jacobiball_py CMake target; this file
only drives cmake and copies the artifact where setuptools expects it.
Install with `pip install --no-build-isolation -e .` so the environment's
pybind11 and Eigen are used directly.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source = Path(__file__).resolve().parent
        build = Path(self.build_temp).resolve() / "cmake"
        build.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(source),
                "-B", str(build),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DJACOBIBALL_BUILD_TESTS=OFF",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build), "--target", "jacobiball_py", "--parallel"],
            check=True,
        )

        staged = build / "python" / "jacobiball"
        modules = list(staged.glob("_core.*"))
        if not modules:
            raise RuntimeError(f"cmake did not produce the extension under {staged}")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(modules[0], target)


setup(
    ext_modules=[CMakeExtension("jacobiball._core")],
    cmdclass={"build_ext": CMakeBuild},
)
