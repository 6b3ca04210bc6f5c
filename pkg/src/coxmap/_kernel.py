"""Kernel backend selection: compiled extension when present, else pure Python.

Setting the environment variable COXMAP_PURE to a non-empty value forces the
pure-Python kernels even when the extension is importable, which is how the
fallback path gets tested and benchmarked.
"""

import os

if os.environ.get("COXMAP_PURE"):
    from coxmap._kernel_py import poly_exact_div, poly_mul

    BACKEND = "python"
else:
    try:
        from coxmap._speedups import poly_exact_div, poly_mul

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build environment
        from coxmap._kernel_py import poly_exact_div, poly_mul

        BACKEND = "python"

__all__ = ["poly_mul", "poly_exact_div", "BACKEND"]
