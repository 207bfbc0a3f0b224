"""Build hook for the optional compiled reduction kernel.

The package is pure Python; the Cython extension is a drop-in twin of
multipres._fp_core and the import selector in multipres.kernels falls back
to the pure module whenever the extension is absent, so a failed build is
not an error.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "multipres._fp_core_cy",
                ["src/multipres/_fp_core_cy.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
