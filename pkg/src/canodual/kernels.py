"""Backend selection for the primal kernels.

The compiled extension is used when it was built; set
``CANODUAL_PURE_PYTHON=1`` to force the NumPy implementation.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("CANODUAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

primal_values = _impl.primal_values
primal_value_grad = _impl.primal_value_grad
descend = _impl.descend

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def problem_args(p):
    """Positional array arguments shared by every kernel."""
    return p.A, p.B, p.beta, p.d, p.f
