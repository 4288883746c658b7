# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic Jacobi eigenvalue sweeps for dense symmetric matrices.

Mirrors ``_jacobi_py`` operation for operation; selected automatically
at import when the extension is available.
"""

import numpy as np

from .errors import ConvergenceError

from libc.math cimport fabs, sqrt


def jacobi_eigenvalues(a, double tol=1e-13, int max_sweeps=60):
    """All eigenvalues of a symmetric matrix via cyclic Jacobi rotations.

    Returns the eigenvalues sorted ascending.  Raises ConvergenceError
    with sweep diagnostics if the off-diagonal norm fails to drop below
    tol times the Frobenius norm within max_sweeps sweeps.
    """
    A = np.array(a, dtype=np.float64, order="C", copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix is not symmetric")

    cdef double[:, ::1] M = A
    cdef Py_ssize_t n = M.shape[0]
    cdef Py_ssize_t p, q, k, sweep
    cdef double fro, off, thresh, app, aqq, apq, g, h, theta, tt, c, s
    cdef double tmp_p, tmp_q
    cdef int done = 0

    fro = _fro_norm(M, n)
    if n == 1 or fro == 0.0:
        return np.sort(np.diag(A))

    off = _off_norm(M, n)
    for sweep in range(max_sweeps):
        if off <= tol * fro:
            done = 1
            break
        # skip negligible rotations during the chaotic first sweeps
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if apq == 0.0 or fabs(apq) <= thresh:
                    continue
                app = M[p, p]
                aqq = M[q, q]
                g = 100.0 * fabs(apq)
                # past the first sweeps, annihilate negligibly small
                # elements outright instead of rotating forever
                if sweep > 4 and fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq):
                    M[p, q] = 0.0
                    M[q, p] = 0.0
                    continue
                h = aqq - app
                if fabs(h) + g == fabs(h):
                    tt = apq / h
                else:
                    theta = 0.5 * h / apq
                    tt = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        tt = -tt
                c = 1.0 / sqrt(1.0 + tt * tt)
                s = tt * c
                # rotate rows p and q, then mirror them into the columns:
                # the transformed matrix is symmetric, so no strided reads
                for k in range(n):
                    tmp_p = M[p, k]
                    tmp_q = M[q, k]
                    M[p, k] = c * tmp_p - s * tmp_q
                    M[q, k] = s * tmp_p + c * tmp_q
                for k in range(n):
                    M[k, p] = M[p, k]
                    M[k, q] = M[q, k]
                M[p, p] = app - tt * apq
                M[q, q] = aqq + tt * apq
                M[p, q] = 0.0
                M[q, p] = 0.0
        off = _off_norm(M, n)

    if not done and off > tol * fro:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge: n={n}, sweeps={max_sweeps}, "
            f"off-diagonal norm {off:.3e} vs target {tol * fro:.3e}"
        )
    return np.sort(np.diag(A))


cdef double _fro_norm(double[:, ::1] M, Py_ssize_t n):
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            acc += M[i, j] * M[i, j]
    return sqrt(acc)


cdef double _off_norm(double[:, ::1] M, Py_ssize_t n):
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc += M[i, j] * M[i, j]
    return sqrt(2.0 * acc)
