"""Householder QR, with and without column pivoting, and the tall pseudoinverse."""
from dataclasses import dataclass

import numba
import numpy as np

from .core import Permutation, PreconditionError, RankDeficientError, as_matrix

_TOL3Z = np.sqrt(np.finfo(np.float64).eps)


@dataclass(frozen=True, eq=False)
class QrFactors:
    """Reduced factors with ``A @ P == Q @ R``.

    Q is m x r with orthonormal columns, R is r x n upper triangular and
    r = min(m, n).  P is the identity for the unpivoted factorization.
    """

    Q: np.ndarray
    R: np.ndarray
    P: Permutation

    @property
    def r_values(self):
        return np.diag(self.R).copy()


@numba.njit(cache=True)
def _colnorm(R, start, j):
    s = 0.0
    for i in range(start, R.shape[0]):
        s += R[i, j] * R[i, j]
    return np.sqrt(s)


@numba.njit(cache=True)
def _householder(R, perm, tau, pivot):
    # In-place LAPACK-style factorization: R is overwritten with the upper
    # triangle and the essential parts of the reflectors below it.
    m, n = R.shape
    r = min(m, n)
    vn1 = np.empty(n)
    vn2 = np.empty(n)
    if pivot:
        for j in range(n):
            vn1[j] = _colnorm(R, 0, j)
            vn2[j] = vn1[j]
    for k in range(r):
        if pivot:
            p = k
            for j in range(k + 1, n):
                if vn1[j] > vn1[p]:
                    p = j
            if p != k:
                for i in range(m):
                    t = R[i, k]
                    R[i, k] = R[i, p]
                    R[i, p] = t
                t2 = perm[k]
                perm[k] = perm[p]
                perm[p] = t2
                vn1[p] = vn1[k]
                vn2[p] = vn2[k]

        alpha = R[k, k]
        xnorm = _colnorm(R, k + 1, k)
        if xnorm == 0.0:
            tau[k] = 0.0
        else:
            beta = -np.copysign(np.hypot(alpha, xnorm), alpha)
            tau[k] = (beta - alpha) / beta
            scale = 1.0 / (alpha - beta)
            for i in range(k + 1, m):
                R[i, k] *= scale
            R[k, k] = beta
            for j in range(k + 1, n):
                w = R[k, j]
                for i in range(k + 1, m):
                    w += R[i, k] * R[i, j]
                w *= tau[k]
                R[k, j] -= w
                for i in range(k + 1, m):
                    R[i, j] -= w * R[i, k]

        if pivot:
            for j in range(k + 1, n):
                if vn1[j] != 0.0:
                    temp = abs(R[k, j]) / vn1[j]
                    temp = max(0.0, 1.0 - temp * temp)
                    ratio = vn1[j] / vn2[j]
                    if temp * ratio * ratio <= _TOL3Z:
                        vn1[j] = _colnorm(R, k + 1, j)
                        vn2[j] = vn1[j]
                    else:
                        vn1[j] *= np.sqrt(temp)


@numba.njit(cache=True)
def _form_q(H, tau):
    # Back-accumulate H_0 ... H_{r-1} applied to the first r columns of I.
    m = H.shape[0]
    r = tau.shape[0]
    Q = np.zeros((r, m)).T
    for i in range(r):
        Q[i, i] = 1.0
    for k in range(r - 1, -1, -1):
        if tau[k] == 0.0:
            continue
        for j in range(k, r):
            w = Q[k, j]
            for i in range(k + 1, m):
                w += H[i, k] * Q[i, j]
            w *= tau[k]
            Q[k, j] -= w
            for i in range(k + 1, m):
                Q[i, j] -= w * H[i, k]
    return Q


def _factor(A, pivot):
    H = as_matrix(A, copy=True)
    m, n = H.shape
    r = min(m, n)
    perm = np.arange(n, dtype=np.int64)
    tau = np.zeros(r)
    _householder(H, perm, tau, pivot)
    Q = _form_q(H, tau)
    R = np.triu(H[:r, :]).copy(order="F")
    # nonnegative R diagonal: flip row i of R together with column i of Q
    neg = np.diag(R) < 0
    R[neg, :] *= -1.0
    Q[:, neg] *= -1.0
    R += 0.0  # normalise signed zeros
    return QrFactors(Q, R, Permutation(perm))


def qr_unpivoted(A):
    """Reduced Householder QR of a matrix with at least as many rows as columns."""
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise PreconditionError(f"qr_unpivoted needs rows >= cols, got {A.shape}")
    return _factor(A, pivot=False)


def qrcp(A):
    """Householder QR with Businger-Golub column pivoting.

    At step k the remaining column with the largest trailing norm is moved
    forward (ties go to the lowest index).  Norms are downdated and
    recomputed once the downdated estimate loses about half its digits.
    """
    return _factor(as_matrix(A), pivot=True)


@numba.njit(cache=True)
def _back_substitute(R, B):
    # Solve R X = B for upper triangular R, overwriting B.
    n = R.shape[0]
    for j in range(B.shape[1]):
        for i in range(n - 1, -1, -1):
            s = B[i, j]
            for k in range(i + 1, n):
                s -= R[i, k] * B[k, j]
            B[i, j] = s / R[i, i]


def pinv_tall(M, rtol=1e-12):
    """Moore-Penrose inverse ``R^-1 Q^T`` of a full-column-rank tall matrix.

    Raises
    ------
    RankDeficientError
        If min |r_ii| <= rtol * max |r_ii| in the unpivoted QR of M.
    """
    M = as_matrix(M)
    if M.shape[0] < M.shape[1]:
        raise PreconditionError(f"pinv_tall needs rows >= cols, got {M.shape}")
    F = qr_unpivoted(M)
    d = np.abs(np.diag(F.R))
    top = d.max()
    ratio = d.min() / top if top > 0 else 0.0
    if not ratio > rtol:
        raise RankDeficientError(
            f"matrix is numerically rank deficient (min/max |r_ii| = {ratio:.3e})", ratio)
    X = np.asfortranarray(F.Q.T).copy(order="F")
    _back_substitute(F.R, X)
    return X
