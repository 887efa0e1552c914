"""One-sided (Hestenes) Jacobi SVD used as the reference oracle."""
import numba
import numpy as np

from .core import ConvergenceFailure, as_matrix

MAX_SWEEPS = 60


@numba.njit(cache=True)
def _jacobi_sweeps(G, V, tol, max_sweeps, want_v):
    m, n = G.shape
    for sweep in range(max_sweeps):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(m):
                    alpha += G[i, p] * G[i, p]
                    beta += G[i, q] * G[i, q]
                    gamma += G[i, p] * G[i, q]
                if gamma == 0.0 or abs(gamma) <= tol * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                rotated += 1
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    gp = G[i, p]
                    gq = G[i, q]
                    G[i, p] = c * gp - s * gq
                    G[i, q] = s * gp + c * gq
                if want_v:
                    for i in range(V.shape[0]):
                        vp = V[i, p]
                        vq = V[i, q]
                        V[i, p] = c * vp - s * vq
                        V[i, q] = s * vp + c * vq
        if rotated == 0:
            return sweep + 1
    return -1


def _tolerance(m):
    return max(1e-14, m * np.finfo(np.float64).eps)


def jacobi_svd(A, compute_uv=False):
    """Thin SVD ``A = U diag(s) V^T`` by cyclic one-sided Jacobi.

    A pair of columns is rotated while |g_p . g_q| > tol ||g_p|| ||g_q||
    with tol = max(1e-14, m * eps); the sweep loop stops once a full sweep
    performs no rotation.  Wide inputs are handled through their transpose.

    Returns ``s`` (descending) or ``(U, s, V)`` when ``compute_uv``.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        out = jacobi_svd(A.T, compute_uv)
        if not compute_uv:
            return out
        U, s, V = out
        return V, s, U
    G = A.copy(order="F")
    V = np.eye(n, order="F") if compute_uv else np.zeros((1, 1), order="F")
    sweeps = _jacobi_sweeps(G, V, _tolerance(m), MAX_SWEEPS, compute_uv)
    if sweeps < 0:
        raise ConvergenceFailure(f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")
    s = np.sqrt(np.einsum("ij,ij->j", G, G))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    if not compute_uv:
        return s
    G = G[:, order]
    V = np.asfortranarray(V[:, order])
    U = np.zeros_like(G)
    nz = s > 0
    U[:, nz] = G[:, nz] / s[nz]
    return np.asfortranarray(U), s, V


def reference_svd(A, compute_uv=False):
    """Singular values of ``A`` in descending order (optionally with factors)."""
    return jacobi_svd(A, compute_uv=compute_uv)
