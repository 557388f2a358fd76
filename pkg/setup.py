import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "gamedyn._kernels._core",
        ["src/gamedyn/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off: keep a*b+c as two rounded ops so the compiled
        # sampler stays bit-identical to the pure numpy path.
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
