"""Kernel backend selection.

Prefers the compiled Cython extension (cyclic Jacobi eigensolver plus the
stepping loops, deterministic and platform-independent); falls back to the
NumPy implementation when the extension is not built.  Force a choice with

    GAPLAB_BACKEND=compiled | python

The two backends satisfy the same numerical contracts and are cross-checked
in ``tests/test_backends.py``; only the compiled one is fast enough for the
long acceptance propagations.
"""

import os

from gaplab.backends import _py_kernels

_requested = os.environ.get("GAPLAB_BACKEND", "").strip().lower()

_compiled = None
if _requested in ("", "compiled"):
    try:
        from gaplab import _kernels as _compiled
    except ImportError:
        _compiled = None

if _requested == "compiled" and _compiled is None:
    raise ImportError(
        "GAPLAB_BACKEND=compiled was requested but the compiled extension "
        "is not available; build it with `python setup.py build_ext --inplace`"
    )
if _requested not in ("", "compiled", "python"):
    raise ValueError(f"unknown GAPLAB_BACKEND value: {_requested!r}")

if _compiled is not None:
    kernels = _compiled
    BACKEND = "compiled"
else:
    kernels = _py_kernels
    BACKEND = "python"

eigh_sym = kernels.eigh_sym
midpoint_propagate = kernels.midpoint_propagate
trotter_propagate = kernels.trotter_propagate
