"""Stewart's QLP decomposition and its rank-k truncation."""
from dataclasses import dataclass

import numpy as np

from .core import PreconditionError, as_matrix
from .qr import qr_unpivoted, qrcp


@dataclass(frozen=True, eq=False)
class QlpFactors:
    """``A == Q @ L @ P.T`` with Q, P orthonormal-column and L lower triangular.

    ``R0`` is the R factor of the first (pivoted) QR.  It is kept for the
    a-posteriori diagnostics in :mod:`rqlp.bounds`.
    """

    Q: np.ndarray
    L: np.ndarray
    P: np.ndarray
    pivoted_second: bool
    R0: np.ndarray = None

    @property
    def l_values(self):
        return np.diag(self.L).copy()

    @property
    def rank(self):
        return self.L.shape[0]


def qlp_decompose(A, pivot_second=True):
    """QLP decomposition by two consecutive Householder QR factorizations.

    The first QR always pivots.  With ``pivot_second=False`` the second is
    unpivoted, which is the setting assumed by the singular-value analysis.

    Parameters
    ----------
    A : array_like, shape (m, n)
    pivot_second : bool

    Returns
    -------
    QlpFactors
        Q is m x r, L is r x r, P is n x r with r = min(m, n).
    """
    A = as_matrix(A)
    first = qrcp(A)
    R0t = first.R.T
    second = qrcp(R0t) if pivot_second else qr_unpivoted(R0t)
    # R0^T P1 = Q1 L^T  =>  A = (Q0 P1) L (P0 Q1)^T
    Q = second.P.apply_columns(first.Q)
    P = first.P.apply_rows(second.Q)
    L = np.asfortranarray(second.R.T)
    return QlpFactors(Q=Q, L=L, P=P, pivoted_second=pivot_second, R0=first.R)


def truncate(F, k):
    """Leading rank-k pieces ``(Q[:, :k], L[:k, :k], P[:, :k])``."""
    r = min(F.L.shape)
    if not 1 <= k <= r:
        raise PreconditionError(f"k must lie in [1, {r}], got {k}")
    return (np.asfortranarray(F.Q[:, :k]),
            np.asfortranarray(F.L[:k, :k]),
            np.asfortranarray(F.P[:, :k]))


def reconstruct(F, k=None):
    """``Q_k L_k P_k^T`` (the full product when ``k`` is None)."""
    from .core import matmul, transpose

    Qk, Lk, Pk = truncate(F, k if k is not None else min(F.L.shape))
    return matmul(matmul(Qk, Lk), transpose(Pk))
