"""Build hook for the optional compiled kernel core.

The package is fully functional without the extension (a numpy fallback is
selected at import); building it just makes batch dataset generation faster.
`pip install -e . --no-build-isolation` compiles it when Cython and a C
compiler are available, and silently skips it otherwise.

-ffp-contract=off keeps the C kernels bit-identical to the numpy fallback
(no FMA fusion of the multiply/subtract sequences).
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/gaftraj/_kernels.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.extra_compile_args.extend(["-O3", "-ffp-contract=off"])
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
