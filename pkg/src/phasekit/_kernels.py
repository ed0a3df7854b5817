"""Hot numeric kernels with numba and numpy implementations.

Two kernels dominate runtime: the cyclic Jacobi sweep used by the
Hermitian eigensolver, and the batched closed-form 2x2 eigensolve used
by the block recovery loop.  Each has a numba-jitted variant and a
numpy variant; `_backend.active_backend()` picks which one runs.
"""

from __future__ import annotations

import numpy as np

from ._backend import HAS_NUMBA, active_backend

# 2x2 eigenvector candidates with squared norm below (_EIG2_FLOOR * scale)^2
# are treated as degenerate (scalar matrix) and fall back to e1.
_EIG2_FLOOR = 1e-14


def _jacobi_numpy(M, V, tol, max_sweeps):
    """Cyclic Jacobi on a real symmetric matrix, in place.

    Rotations are applied pivot by pivot with vectorized row/column
    updates.  Returns (sweeps_used, final_offdiag_norm).
    """
    n = M.shape[0]
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return 0, 0.0
    thresh = tol * norm
    skip = 0.1 * thresh / n
    sweeps = 0
    while sweeps < max_sweeps:
        off2 = np.sum(np.square(M)) - np.sum(np.square(np.diag(M)))
        if np.sqrt(max(off2, 0.0)) <= thresh:
            return sweeps, np.sqrt(max(off2, 0.0))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if abs(apq) <= skip:
                    continue
                tau = 0.5 * (M[q, q] - M[p, p]) / apq
                t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                mp = M[:, p].copy()
                mq = M[:, q].copy()
                M[:, p] = c * mp - s * mq
                M[:, q] = s * mp + c * mq
                mp = M[p, :].copy()
                mq = M[q, :].copy()
                M[p, :] = c * mp - s * mq
                M[q, :] = s * mp + c * mq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        sweeps += 1
    off2 = np.sum(np.square(M)) - np.sum(np.square(np.diag(M)))
    return sweeps, np.sqrt(max(off2, 0.0))


def _eig2_batch_numpy(qa, qd, qc):
    """Top eigenpair of a batch of 2x2 Hermitian matrices [[a, c], [c*, d]].

    Returns (lam1, lam2, u1) with lam1 >= lam2 and u1 unit-norm.  The
    eigenvector is the larger-norm of the two analytic candidates
    (c, lam1 - a) and (lam1 - d, conj(c)), which avoids cancellation for
    near-diagonal input.
    """
    tr = qa + qd
    disc = np.sqrt((qa - qd) ** 2 + 4.0 * np.abs(qc) ** 2)
    lam1 = 0.5 * (tr + disc)
    lam2 = 0.5 * (tr - disc)

    n1 = np.abs(qc) ** 2 + (lam1 - qa) ** 2
    n2 = (lam1 - qd) ** 2 + np.abs(qc) ** 2
    use_first = n1 >= n2
    u = np.empty(qa.shape + (2,), dtype=np.complex128)
    u[..., 0] = np.where(use_first, qc, lam1 - qd)
    u[..., 1] = np.where(use_first, lam1 - qa, np.conj(qc))

    scale2 = qa * qa + qd * qd + 2.0 * np.abs(qc) ** 2
    best = np.where(use_first, n1, n2)
    degenerate_dir = best <= (_EIG2_FLOOR**2) * scale2
    u[..., 0] = np.where(degenerate_dir, 1.0, u[..., 0])
    u[..., 1] = np.where(degenerate_dir, 0.0, u[..., 1])
    u /= np.sqrt(np.abs(u[..., 0]) ** 2 + np.abs(u[..., 1]) ** 2)[..., None]
    return lam1, lam2, u


if HAS_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _jacobi_numba(M, V, tol, max_sweeps):  # pragma: no cover - numba
        n = M.shape[0]
        norm = 0.0
        for i in range(n):
            for j in range(n):
                norm += M[i, j] * M[i, j]
        norm = np.sqrt(norm)
        if norm == 0.0:
            return 0, 0.0
        thresh = tol * norm
        skip = 0.1 * thresh / n
        sweeps = 0
        while sweeps < max_sweeps:
            off2 = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off2 += 2.0 * M[p, q] * M[p, q]
            if np.sqrt(off2) <= thresh:
                return sweeps, np.sqrt(off2)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = M[p, q]
                    if abs(apq) <= skip:
                        continue
                    tau = 0.5 * (M[q, q] - M[p, p]) / apq
                    t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
                    if tau < 0.0:
                        t = -t
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        mkp = M[k, p]
                        mkq = M[k, q]
                        M[k, p] = c * mkp - s * mkq
                        M[k, q] = s * mkp + c * mkq
                    for k in range(n):
                        mpk = M[p, k]
                        mqk = M[q, k]
                        M[p, k] = c * mpk - s * mqk
                        M[q, k] = s * mpk + c * mqk
                    for k in range(n):
                        vkp = V[k, p]
                        vkq = V[k, q]
                        V[k, p] = c * vkp - s * vkq
                        V[k, q] = s * vkp + c * vkq
            sweeps += 1
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 += 2.0 * M[p, q] * M[p, q]
        return sweeps, np.sqrt(off2)

    @njit(cache=True)
    def _eig2_batch_numba(qa, qd, qc):  # pragma: no cover - numba
        m = qa.shape[0]
        lam1 = np.empty(m)
        lam2 = np.empty(m)
        u = np.empty((m, 2), dtype=np.complex128)
        floor2 = _EIG2_FLOOR * _EIG2_FLOOR
        for i in range(m):
            a = qa[i]
            d = qd[i]
            c = qc[i]
            c2 = c.real * c.real + c.imag * c.imag
            disc = np.sqrt((a - d) * (a - d) + 4.0 * c2)
            l1 = 0.5 * (a + d + disc)
            lam1[i] = l1
            lam2[i] = 0.5 * (a + d - disc)
            n1 = c2 + (l1 - a) * (l1 - a)
            n2 = (l1 - d) * (l1 - d) + c2
            if n1 >= n2:
                u0 = c
                u1 = complex(l1 - a, 0.0)
                best = n1
            else:
                u0 = complex(l1 - d, 0.0)
                u1 = np.conj(c)
                best = n2
            scale2 = a * a + d * d + 2.0 * c2
            if best <= floor2 * scale2:
                u0 = complex(1.0, 0.0)
                u1 = complex(0.0, 0.0)
            nrm = np.sqrt(abs(u0) ** 2 + abs(u1) ** 2)
            u[i, 0] = u0 / nrm
            u[i, 1] = u1 / nrm
        return lam1, lam2, u


def jacobi_real_symmetric(M, tol, max_sweeps):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Returns (values, vectors, sweeps, offdiag_norm); `values` unsorted,
    `vectors` columns paired with them.  The input is not modified.
    """
    work = np.array(M, dtype=np.float64, order="C", copy=True)
    n = work.shape[0]
    V = np.eye(n)
    if active_backend() == "numba":
        sweeps, off = _jacobi_numba(work, V, tol, max_sweeps)
    else:
        sweeps, off = _jacobi_numpy(work, V, tol, max_sweeps)
    return np.diag(work).copy(), V, sweeps, off


def eig2_batch(qa, qd, qc):
    """Batched top eigenpair of 2x2 Hermitian matrices, backend dispatched."""
    qa = np.ascontiguousarray(qa, dtype=np.float64)
    qd = np.ascontiguousarray(qd, dtype=np.float64)
    qc = np.ascontiguousarray(qc, dtype=np.complex128)
    if active_backend() == "numba":
        return _eig2_batch_numba(qa, qd, qc)
    return _eig2_batch_numpy(qa, qd, qc)
