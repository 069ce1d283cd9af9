import os

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension(
            "fsorf.kernels._series_cy",
            sources=["src/fsorf/kernels/_series_cy.pyx"],
            # error-free float transforms require exact IEEE products
            extra_compile_args=["-O2", "-ffp-contract=off"],
        )],
        language_level=3,
    )
except ImportError:
    # pure-Python kernels are selected at import when the extension is absent
    pass

setup(ext_modules=ext_modules)
