"""Float kernels with a compiled core and a numpy fallback.

The Cython extension ``definetti._kernels`` is used when it imports; set
``DEFINETTI_PURE_PYTHON=1`` to force the fallback.  ``BACKEND`` names the
active implementation.
"""

import os

from . import _kernels_py

if os.environ.get("DEFINETTI_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

nnls = _impl.nnls
refine_atoms = _impl.refine_atoms
symmetric_eigen = _impl.symmetric_eigen


def implementations():
    """All importable backends as ``{name: module}``."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
