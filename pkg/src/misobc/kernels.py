"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``MISOBC_KERNELS=python`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("MISOBC_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

null_directions = _impl.null_directions
stream_gains = _impl.stream_gains
layered_rates = _impl.layered_rates


def backends():
    """Available kernel modules keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
    except ImportError:
        return found
    found["cython"] = compiled
    return found
