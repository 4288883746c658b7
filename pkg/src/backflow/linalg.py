"""Eigensolver backend selection.

The compiled extension is preferred when importable; setting the
environment variable ``BACKFLOW_PURE_PYTHON=1`` before import forces the
pure-Python fallback (used by the benchmark and the fallback tests).
"""

from __future__ import annotations

import os

if os.environ.get("BACKFLOW_PURE_PYTHON") == "1":
    from ._jacobi_py import jacobi_eigenvalues

    CORE_BACKEND = "python"
else:
    try:
        from ._jacobi import jacobi_eigenvalues  # type: ignore[no-redef]

        CORE_BACKEND = "compiled"
    except ImportError:
        from ._jacobi_py import jacobi_eigenvalues  # type: ignore[no-redef]

        CORE_BACKEND = "python"

__all__ = ["jacobi_eigenvalues", "CORE_BACKEND"]
