"""Kernel backend selection.

The four dense kernels (mgs, jacobi_eig, cholesky_solve, lu_solve) exist
twice: a compiled extension (``_native``) and a numpy fallback (``_python``).
The compiled module is preferred when importable; set PROJRES_KERNELS to
``python`` or ``native`` to force one.  ``BACKEND`` records the choice.
"""

import os

from . import _python

_requested = os.environ.get("PROJRES_KERNELS", "auto").strip().lower()

if _requested in ("auto", "", "native"):
    try:
        from . import _native as _impl
        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise
        _impl = _python
        BACKEND = "python"
elif _requested in ("python", "py"):
    _impl = _python
    BACKEND = "python"
else:
    raise ValueError(
        f"PROJRES_KERNELS={_requested!r}: expected 'auto', 'native' or 'python'")

mgs = _impl.mgs
jacobi_eig = _impl.jacobi_eig
cholesky_solve = _impl.cholesky_solve
lu_solve = _impl.lu_solve


def available_backends():
    """Names of importable backends, fallback first."""
    names = ["python"]
    try:
        from . import _native  # noqa: F401
        names.append("native")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the backend module for ``name`` ('python' or 'native')."""
    if name == "python":
        return _python
    if name == "native":
        from . import _native
        return _native
    raise ValueError(f"unknown kernel backend {name!r}")
