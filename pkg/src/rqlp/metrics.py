"""Approximation-quality metrics for QLP-family factorizations."""
from dataclasses import dataclass

import numpy as np

from .core import PreconditionError, as_matrix, frobenius_norm
from .qlp import reconstruct
from .svd import reference_svd

__all__ = ["ErrorMetrics", "error_metrics", "reference_svd", "optimal_frobenius_error"]


@dataclass(frozen=True)
class ErrorMetrics:
    ef: float
    ae: np.ndarray
    re: np.ndarray
    l_abs: np.ndarray
    sigma_ref: np.ndarray
    re_flagged: bool


def error_metrics(A, factors, k, ref_sigmas=None):
    """Relative Frobenius error of the rank-k truncation and L-value errors.

    ``ef = ||A - Q_k L_k P_k^T||_F / ||A||_F``; ``ae[j] = |sigma_j - |l_jj||``
    and ``re[j] = ae[j] / sigma_j`` for j < k, with L-values taken in factor
    order.  A zero reference singular value yields ``re = inf`` and sets
    ``re_flagged``.
    """
    A = as_matrix(A)
    if ref_sigmas is None:
        ref_sigmas = reference_svd(A)
    ref_sigmas = np.asarray(ref_sigmas, dtype=np.float64)
    if len(ref_sigmas) < k:
        raise PreconditionError(f"need at least k = {k} reference singular values")
    A_hat = reconstruct(factors, k)
    norm_a = frobenius_norm(A)
    ef = frobenius_norm(A - A_hat) / norm_a if norm_a > 0 else 0.0
    sig = ref_sigmas[:k]
    l_abs = np.abs(np.diag(factors.L)[:k])
    ae = np.abs(sig - l_abs)
    with np.errstate(divide="ignore", invalid="ignore"):
        re = np.where(sig > 0, ae / np.where(sig > 0, sig, 1.0), np.inf)
    return ErrorMetrics(ef=ef, ae=ae, re=re, l_abs=l_abs, sigma_ref=sig.copy(),
                        re_flagged=bool(np.any(sig <= 0)))


def optimal_frobenius_error(sigmas, k):
    """Eckart-Young optimum ``sqrt(sum_{i>k} sigma_i^2) / ||sigma||_2``."""
    s = np.asarray(sigmas, dtype=np.float64)
    return float(np.sqrt(np.sum(s[k:] ** 2)) / np.sqrt(np.sum(s**2)))
