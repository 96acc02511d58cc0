"""Hot kernels with a compiled core and a pure-python fallback.

The cython extension (built by setup.py) is picked at import time when
present; set ``STORYORDER_PURE=1`` to force the fallback. Both backends
implement identical semantics and are cross-checked in the test suite;
``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

from . import _pure

if os.environ.get("STORYORDER_PURE") == "1":
    _impl = _pure
    HAVE_SPEEDUPS = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        HAVE_SPEEDUPS = True
    except ImportError:
        _impl = _pure
        HAVE_SPEEDUPS = False

best_path_exhaustive = _impl.best_path_exhaustive
best_path_greedy = _impl.best_path_greedy
path_total = _impl.path_total
count_inversions = _impl.count_inversions


def backend_name() -> str:
    return "cython" if HAVE_SPEEDUPS else "pure-python"
