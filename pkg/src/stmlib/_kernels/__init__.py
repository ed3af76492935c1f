"""Kernel dispatch: compiled extension when built, pure Python otherwise.

Set STMLIB_PURE_KERNELS=1 in the environment to force the pure-Python
kernels even when the extension is available (useful for benchmarking
one against the other).
"""

import os

if os.environ.get("STMLIB_PURE_KERNELS"):
    from .pykernels import BACKEND, graph_has_cycle, node_on_cycle, version_index
else:
    try:
        from ._ckernels import (  # type: ignore[import-not-found]
            BACKEND,
            graph_has_cycle,
            node_on_cycle,
            version_index,
        )
    except ImportError:
        from .pykernels import (
            BACKEND,
            graph_has_cycle,
            node_on_cycle,
            version_index,
        )

__all__ = ["BACKEND", "graph_has_cycle", "node_on_cycle", "version_index"]
