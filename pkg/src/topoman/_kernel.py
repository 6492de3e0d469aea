"""Selects the path-search kernel at import time.

The compiled extension is used when available; the pure-Python kernel is
the fallback. Set TOPOMAN_PURE_PYTHON=1 to force the fallback (useful for
benchmarking and debugging). Both kernels implement the same contract and
are cross-checked in the test suite.
"""

import os

if os.environ.get("TOPOMAN_PURE_PYTHON"):
    from topoman import _cspf_py as _impl

    USING_COMPILED_KERNEL = False
else:
    try:
        from topoman import _cspf_cy as _impl  # type: ignore[attr-defined]

        USING_COMPILED_KERNEL = True
    except ImportError:
        from topoman import _cspf_py as _impl

        USING_COMPILED_KERNEL = False

shortest_feasible_path = _impl.shortest_feasible_path
