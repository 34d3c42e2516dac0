"""Kernel backend selection.

The compiled extension is preferred when importable; set ``SHALLOWPACK_PURE=1``
to force the numpy fallback (used by the benchmark and the parity tests).
"""

import os

from . import _pykernels

_impl = _pykernels
_BACKEND = "python"

if os.environ.get("SHALLOWPACK_PURE", "") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:
        pass


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _BACKEND


popcounts = _impl.popcounts
distances_to = _impl.distances_to
pairwise_distances = _impl.pairwise_distances
min_pairwise_distance = _impl.min_pairwise_distance
greedy_select = _impl.greedy_select
prim_mst = _impl.prim_mst
