"""Builds the pybind11 extension through CMake and ships the cpld package.

Use `pip install . --no-build-isolation` (cmake and a C++20 compiler
required).
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
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        out_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S",
            str(source_dir),
            "-B",
            str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DCPLD_BUILD_CLI=OFF",
            "-DCPLD_BUILD_TESTS=OFF",
            "-DCPLD_BUILD_PYTHON=ON",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "cpld_core", "-j"],
            check=True,
        )

        module_dir = build_dir / "python" / "cpld"
        for artifact in module_dir.glob("_core*"):
            shutil.copy2(artifact, out_dir / artifact.name)


setup(
    packages=["cpld"],
    package_dir={"cpld": "python/cpld"},
    ext_modules=[CMakeExtension("cpld._core")],
    cmdclass={"build_ext": CMakeBuild},
)
