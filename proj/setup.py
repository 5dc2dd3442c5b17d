import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = sorted(glob.glob("src/*/*.cpp")) + ["python/module.cpp"]

setup(
    ext_modules=[
        Pybind11Extension(
            "codescope._codescope",
            sources,
            include_dirs=["include", "vendor"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
