"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over. Set ``FPPLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from fpplab import _pykernels

if os.environ.get("FPPLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from fpplab import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

dijkstra = _impl.dijkstra
weighted_eccentricities = _impl.weighted_eccentricities
bfs = _impl.bfs
hop_eccentricities = _impl.hop_eccentricities
component_labels = _impl.component_labels
async_push = _impl.async_push


def backends():
    """Map of available backend name to kernel module."""
    out = {"python": _pykernels}
    try:
        from fpplab import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
