"""Dense matrix plumbing shared by every decomposition in the package.

Matrices are plain ``numpy.ndarray`` objects of dtype float64 stored in
column-major (Fortran) order.  The reductions below accumulate in a fixed
order so that results are bitwise reproducible regardless of the BLAS
library or thread count in use.
"""
from dataclasses import dataclass

import numba
import numpy as np


class PreconditionError(ValueError):
    """Raised when an argument violates a documented precondition."""


class RankDeficientError(np.linalg.LinAlgError):
    """A matrix that must have full column rank is numerically singular.

    ``ratio`` is min |r_ii| / max |r_ii| of the offending R factor.
    """

    def __init__(self, message, ratio):
        super().__init__(message)
        self.ratio = ratio


class ConvergenceFailure(np.linalg.LinAlgError):
    """An iterative method ran out of sweeps."""


class RankDeficientWarning(RuntimeWarning):
    pass


def as_matrix(A, copy=False):
    """Return ``A`` as a finite, 2-D, column-major float64 array."""
    M = np.asarray(A, dtype=np.float64, order="F")
    if copy:
        M = M.copy(order="F")
    if M.ndim != 2:
        raise PreconditionError(f"expected a 2-D matrix, got shape {M.shape}")
    if M.shape[0] < 1 or M.shape[1] < 1:
        raise PreconditionError(f"matrix dimensions must be positive, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise PreconditionError("matrix has non-finite entries")
    return M


@numba.njit(cache=True)
def _gemm_acc(C, A, B):
    # C += A @ B; every C[i, j] accumulates its products in ascending k.
    m, K = A.shape
    n = B.shape[1]
    for j in range(n):
        for k in range(K):
            b = B[k, j]
            for i in range(m):
                C[i, j] += A[i, k] * b


def matmul_into(C, A, B):
    """Accumulate ``A @ B`` into ``C`` in place (ascending inner index).

    Streaming row blocks of ``B`` through this with the matching column
    blocks of ``A`` reproduces :func:`matmul` bit for bit.
    """
    if A.shape[1] != B.shape[0] or C.shape != (A.shape[0], B.shape[1]):
        raise PreconditionError(
            f"shape mismatch: {C.shape} += {A.shape} @ {B.shape}")
    _gemm_acc(C, np.asfortranarray(A), np.asfortranarray(B))
    return C


def matmul(A, B):
    """Matrix product with a fixed, ascending-k accumulation order."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise PreconditionError(f"cannot multiply {A.shape} by {B.shape}")
    C = np.zeros((A.shape[0], B.shape[1]), order="F")
    return matmul_into(C, A, B)


def transpose(A):
    """Column-major copy of ``A.T``."""
    return np.asfortranarray(np.asarray(A, dtype=np.float64).T).copy(order="F")


@numba.njit(cache=True)
def _sumsq(A):
    s = 0.0
    m, n = A.shape
    for j in range(n):
        for i in range(m):
            s += A[i, j] * A[i, j]
    return s


def frobenius_norm(A):
    """Square root of the column-major running sum of squared entries."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    return float(np.sqrt(_sumsq(A)))


def spectral_norm(A):
    """Largest singular value, via the one-sided Jacobi reference SVD."""
    from .svd import reference_svd

    return float(reference_svd(A)[0])


@dataclass(frozen=True, eq=False)
class Permutation:
    """Column permutation: ``(A @ P)[:, j] == A[:, perm[j]]``."""

    perm: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.perm, dtype=np.intp)
        if p.ndim != 1 or len(p) == 0 or not np.array_equal(np.sort(p), np.arange(len(p))):
            raise PreconditionError("perm must be a bijection on 0..size-1")
        object.__setattr__(self, "perm", p)

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    @property
    def size(self):
        return len(self.perm)

    def inverse(self):
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.size)
        return Permutation(inv)

    def apply_columns(self, A):
        """``A @ P``."""
        return np.asfortranarray(np.asarray(A)[:, self.perm])

    def apply_rows_transposed(self, A):
        """``P.T @ A``: row j of the result is row ``perm[j]`` of ``A``."""
        return np.asfortranarray(np.asarray(A)[self.perm, :])

    def apply_rows(self, A):
        """``P @ A``."""
        return np.asfortranarray(np.asarray(A)[self.inverse().perm, :])

    def matrix(self):
        P = np.zeros((self.size, self.size), order="F")
        P[self.perm, np.arange(self.size)] = 1.0
        return P

    def is_identity(self):
        return bool(np.array_equal(self.perm, np.arange(self.size)))

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())
