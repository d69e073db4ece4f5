"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
versions are used. Setting QENCOST_PURE=1 forces the numpy versions.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("QENCOST_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        pass

apply_matrix = _impl.apply_matrix
apply_swap = _impl.apply_swap
mcx_rows = _impl.mcx_rows
count_band_sequences = _impl.count_band_sequences


def backends():
    """Map of available backend name -> module."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
