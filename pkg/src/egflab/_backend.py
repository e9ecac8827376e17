"""Select the compiled kernel core, falling back to pure Python.

The compiled extension (egflab._kernels, Cython) and egflab._kernels_py
implement the same functions with identical outputs; set EGFLAB_PURE_PYTHON=1
to force the fallback.  benchmarks/bench_kernels.py compares the two.
"""

import os

if os.environ.get("EGFLAB_PURE_PYTHON") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels


def backend_name() -> str:
    return kernels.BACKEND
