from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-python fallback in storyorder._kernels covers every kernel;
    # the extension is an optional speedup.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "storyorder._kernels._speedups",
                ["src/storyorder/_kernels/_speedups.pyx"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
