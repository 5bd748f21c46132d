"""Build script: compiles a Cython twin of the move-generation kernel.

The kernel source is src/guanzero/combos/_gen.py. At build time it is copied
to _gen_c.py and cythonized into the extension guanzero.combos._gen_c; the
package falls back to the interpreted module when the extension is missing,
so a failed compile still yields a working install.
"""

import shutil
from pathlib import Path

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    src = Path("src") / "guanzero" / "combos" / "_gen.py"
    twin = src.with_name("_gen_c.py")
    shutil.copyfile(src, twin)
    ext_modules = cythonize(
        [Extension("guanzero.combos._gen_c", [twin.as_posix()])],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"cython kernel disabled ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
