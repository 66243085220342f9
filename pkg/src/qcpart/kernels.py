"""Kernel backend selection: compiled extension with pure-Python fallback.

``QCPART_FORCE_PY=1`` in the environment forces the fallback, which is useful
for benchmarking and for debugging the compiled paths.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("QCPART_FORCE_PY"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

bfs_vn_to_cns = _impl.bfs_vn_to_cns
bfs_ces_cycle = _impl.bfs_ces_cycle
spa_decode = _impl.spa_decode
