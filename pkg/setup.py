"""Build script: compiles the grid-sup kernel when Cython is available."""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/hodgelab/torus/_gridsup.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.extra_compile_args.append("-O3")
except ImportError:  # pure-Python install; the NumPy kernel is used
    ext_modules = []

setup(ext_modules=ext_modules)
