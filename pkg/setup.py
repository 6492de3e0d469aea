from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "topoman._cspf_cy",
        ["src/topoman/_cspf_cy.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
