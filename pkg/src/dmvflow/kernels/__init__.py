"""Hot finite-volume kernels with a compiled core and a NumPy fallback.

The backend is picked once at import time:

* ``DMVFLOW_KERNELS=cython``  force the compiled extension (ImportError if
  it was not built);
* ``DMVFLOW_KERNELS=numpy``   force the pure-NumPy fallback;
* unset / ``auto``            compiled if available, else NumPy.

Both backends implement the same contract; ``available_backends`` lets the
benchmark and the parity tests grab them side by side.
"""

import os

from . import _numpy_backend

_choice = os.environ.get("DMVFLOW_KERNELS", "auto").strip().lower()
if _choice not in ("auto", "cython", "numpy"):
    raise ValueError(f"DMVFLOW_KERNELS must be auto, cython, or numpy; got {_choice!r}")

if _choice == "numpy":
    _impl = _numpy_backend
    backend_name = "numpy"
else:
    try:
        from . import _ext_backend as _impl  # type: ignore[attr-defined]

        backend_name = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        _impl = _numpy_backend
        backend_name = "numpy"

rhs = _impl.rhs


def available_backends():
    """Name -> rhs callable for every backend importable in this build."""
    out = {"numpy": _numpy_backend.rhs}
    try:
        from . import _ext_backend

        out["cython"] = _ext_backend.rhs
    except ImportError:
        pass
    return out
