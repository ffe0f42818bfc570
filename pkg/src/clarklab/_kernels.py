"""Backend selection for the hot kernels.

The compiled module is used when it imports; ``CLARKLAB_PURE=1`` forces the
numpy fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

try:
    if os.environ.get("CLARKLAB_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

return_time_scan = _impl.return_time_scan
return_time_records = _impl.return_time_records
blaschke_eval = _impl.blaschke_eval
difference_quotient = _impl.difference_quotient

__all__ = [
    "BACKEND",
    "return_time_scan",
    "return_time_records",
    "blaschke_eval",
    "difference_quotient",
]
