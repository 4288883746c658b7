"""Pure-Python cyclic Jacobi eigenvalue sweeps (numpy row/column updates).

Fallback for environments without the compiled extension; identical
rotation schedule and formulas, so both backends agree to rounding.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError

__all__ = ["jacobi_eigenvalues"]


def _off_norm(a: np.ndarray) -> float:
    # summed strictly over off-diagonal entries: subtracting the diagonal
    # from the full Frobenius norm cancels to rounding noise once the
    # matrix is numerically diagonal
    upper = np.triu(a, 1)
    return math.sqrt(2.0) * float(np.linalg.norm(upper))


def jacobi_eigenvalues(
    a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60
) -> np.ndarray:
    """All eigenvalues of a symmetric matrix via cyclic Jacobi rotations.

    Returns the eigenvalues sorted ascending.  Raises ConvergenceError
    with sweep diagnostics if the off-diagonal norm fails to drop below
    tol times the Frobenius norm within max_sweeps sweeps.
    """
    m = np.array(a, dtype=np.float64, order="C", copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(m).max()))):
        raise ValueError("matrix is not symmetric")

    n = m.shape[0]
    fro = float(np.linalg.norm(m))
    if n == 1 or fro == 0.0:
        return np.sort(np.diag(m))

    off = _off_norm(m)
    for sweep in range(max_sweeps):
        if off <= tol * fro:
            return np.sort(np.diag(m))
        # skip negligible rotations during the chaotic first sweeps
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0 or abs(apq) <= thresh:
                    continue
                app = m[p, p]
                aqq = m[q, q]
                g = 100.0 * abs(apq)
                # past the first sweeps, annihilate negligibly small
                # elements outright instead of rotating forever
                if sweep > 4 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    m[p, q] = m[q, p] = 0.0
                    continue
                h = aqq - app
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # rotate rows p and q, then mirror them into the columns:
                # the transformed matrix is symmetric, so no strided reads
                row_p = c * m[p, :] - s * m[q, :]
                row_q = s * m[p, :] + c * m[q, :]
                m[p, :] = row_p
                m[q, :] = row_q
                m[:, p] = row_p
                m[:, q] = row_q
                m[p, p] = app - t * apq
                m[q, q] = aqq + t * apq
                m[p, q] = m[q, p] = 0.0
        off = _off_norm(m)

    if off > tol * fro:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge: n={n}, sweeps={max_sweeps}, "
            f"off-diagonal norm {off:.3e} vs target {tol * fro:.3e}"
        )
    return np.sort(np.diag(m))
