"""Cyclic Jacobi eigensolver for small Hermitian matrices.

A Hermitian ``H = A + iB`` is diagonalised through its real symmetric
embedding ``[[A, -B], [B, A]]``, whose spectrum is that of ``H`` with every
eigenvalue doubled. The solver works on stacks of matrices: each matrix in
the stack follows exactly the rotation sequence it would follow alone, so
results do not depend on how a workload is batched.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericError

OFF_TOL = 1e-26
MAX_SWEEPS = 50


def _off2(a):
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sum(np.where(mask, a * a, 0.0), axis=(-2, -1))


def jacobi_eigh_real(a, vectors=True, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decomposition of real symmetric matrices of shape ``(..., n, n)``.

    Converged when the squared off-diagonal Frobenius norm drops below
    ``tol * max(1, ||A||_F^2)``. Returns ``(w, v)`` with eigenvalues sorted
    ascending and eigenvectors in the columns of ``v``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    single = a.ndim == 2
    if single:
        a = a[None]
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n), a.shape).copy()
    thresh = tol * np.maximum(1.0, np.sum(a * a, axis=(-2, -1)))

    sweeps = 0
    while True:
        active = _off2(a) >= thresh
        if not np.any(active):
            break
        if sweeps >= max_sweeps:
            raise NumericError(
                "Jacobi eigensolver did not converge",
                sweeps=sweeps,
                unconverged=int(np.count_nonzero(active)),
                max_off2=float(np.max(_off2(a))),
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                rotate = active & (apq != 0.0)
                if not np.any(rotate):
                    continue
                safe = np.where(rotate, apq, 1.0)
                # tiny a_pq can overflow theta; the |theta| guard below covers it
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                tb = np.where(big, 0.0, theta)
                t = np.where(
                    big,
                    0.5 / np.where(big, theta, 1.0),
                    np.sign(tb) / (np.abs(tb) + np.sqrt(tb * tb + 1.0)),
                )
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc = c[:, None]
                ss = s[:, None]

                col_p = a[:, :, p].copy()
                col_q = a[:, :, q].copy()
                a[:, :, p] = cc * col_p - ss * col_q
                a[:, :, q] = ss * col_p + cc * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :].copy()
                a[:, p, :] = cc * row_p - ss * row_q
                a[:, q, :] = ss * row_p + cc * row_q
                a[:, p, q] = np.where(rotate, 0.0, a[:, p, q])
                a[:, q, p] = np.where(rotate, 0.0, a[:, q, p])

                if vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q].copy()
                    v[:, :, p] = cc * vp - ss * vq
                    v[:, :, q] = ss * vp + cc * vq

    w = np.einsum("...ii->...i", a).copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=-1)
    if single:
        return (w[0], v[0]) if vectors else w[0]
    return (w, v) if vectors else w


def real_embedding(h):
    """``[[Re H, -Im H], [Im H, Re H]]`` for Hermitian ``H``, stack-aware."""
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def eigvalsh(h):
    """Ascending eigenvalues of Hermitian matrices of shape ``(..., n, n)``."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[-1]
    w = jacobi_eigh_real(real_embedding(h.reshape((-1, n, n))), vectors=False)
    # eigenvalues of the embedding come in exactly degenerate pairs
    w = 0.5 * (w[:, 0::2] + w[:, 1::2])
    return w.reshape(h.shape[:-1])


def eigh(h):
    """Eigenvalues and orthonormal eigenvectors of one Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[-1]
    if h.shape != (n, n):
        raise ValueError("eigh takes a single matrix")
    w2, v2 = jacobi_eigh_real(real_embedding(h))
    # each real eigenvector (u, v) of the embedding maps to u + iv, an
    # eigenvector of H; pick an orthonormal set of n from the 2n candidates
    cand = v2[:n, :] + 1j * v2[n:, :]
    vals, vecs = [], []
    for k in range(2 * n):
        z = cand[:, k].copy()
        for e in vecs:
            z -= e * np.vdot(e, z)
        norm = np.linalg.norm(z)
        if norm > 0.5:
            z /= norm
            # fix the phase so the largest component is real positive
            j = int(np.argmax(np.abs(z)))
            z *= np.abs(z[j]) / z[j]
            vecs.append(z)
            vals.append(float(np.real(np.vdot(z, h @ z))))
        if len(vecs) == n:
            break
    if len(vecs) != n:
        raise NumericError("could not recover a complete eigenbasis", found=len(vecs))
    vecs = np.array(vecs).T
    vals = np.array(vals)
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]
