"""Randomized QLP: the two-pass RQLP and the single-pass SPRQLP / SORQLP.

Every algorithm reads the input through :class:`MatrixSource`, which hands
out one-shot row-block streams and counts how often each entry was read.
The single-pass algorithms open exactly one stream; RQLP opens two.
"""
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (PreconditionError, RankDeficientError, RankDeficientWarning,
                   as_matrix, matmul, matmul_into, transpose)
from .qlp import QlpFactors, qlp_decompose
from .qr import pinv_tall, qr_unpivoted
from .rng import SeededGaussianSource, gaussian_matrix
from .svd import jacobi_svd

DEFAULT_BLOCK_SIZE = 64
PINV_RTOL = 1e-12


class StreamConsumedError(RuntimeError):
    pass


class RowStream:
    """Row blocks of a matrix, deliverable exactly once.

    Iterating yields ``(row_start, block)`` pairs in ascending row order.
    """

    def __init__(self, blocks, shape):
        self._blocks = blocks
        self.shape = shape
        self._used = False

    def __iter__(self):
        if self._used:
            raise StreamConsumedError("row stream has already been consumed")
        self._used = True
        return iter(self._blocks)


class MatrixSource:
    """In-memory matrix exposed only through counted row-block streams."""

    def __init__(self, A, block_size=DEFAULT_BLOCK_SIZE):
        self._A = as_matrix(A)
        if block_size < 1:
            raise PreconditionError("block_size must be positive")
        self.block_size = int(block_size)
        self.counts = np.zeros(self._A.shape, dtype=np.int64)
        self.passes = 0

    @property
    def shape(self):
        return self._A.shape

    def _blocks(self):
        m = self._A.shape[0]
        for start in range(0, m, self.block_size):
            stop = min(start + self.block_size, m)
            self.counts[start:stop, :] += 1
            yield start, np.asfortranarray(self._A[start:stop, :])

    def stream(self):
        self.passes += 1
        return RowStream(self._blocks(), self.shape)


def _as_source(A, block_size):
    if isinstance(A, MatrixSource):
        return A
    return MatrixSource(A, block_size)


@dataclass(frozen=True)
class SketchConfig:
    """Sketch sizes for the randomized algorithms.

    ``l1 = k + p`` columns are sampled.  ``l2`` rows are sampled by SPRQLP
    only and defaults to ``max(2k, l1)``.
    """

    k: int
    p: int = 5
    l2: int = None
    seed: int = 0
    pivot_second: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise PreconditionError(f"target rank k must be >= 2, got {self.k}")
        if self.p < 2:
            raise PreconditionError(f"oversampling p must be >= 2, got {self.p}")
        if self.l2 is None:
            object.__setattr__(self, "l2", max(2 * self.k, self.l1))
        if self.l2 < self.l1:
            raise PreconditionError(f"l2 = {self.l2} must be >= l1 = {self.l1}")

    @property
    def l1(self):
        return self.k + self.p

    def check(self, shape):
        m, n = shape
        if self.l1 > min(m, n):
            raise PreconditionError(
                f"l1 = k + p = {self.l1} exceeds min(m, n) = {min(m, n)}")


@dataclass(frozen=True, eq=False)
class RandQlpResult:
    """Factors of a randomized QLP plus the sketch quantities behind them.

    ``basis`` is the orthonormal range basis V and ``core`` the small
    l1 x n matrix B whose QLP was taken.
    """

    factors: QlpFactors
    config: SketchConfig
    algorithm: str
    elapsed: float
    basis: np.ndarray = field(repr=False)
    core: np.ndarray = field(repr=False)


def _finish(V, B, cfg):
    inner = qlp_decompose(B, pivot_second=cfg.pivot_second)
    Q = matmul(V, inner.Q)
    return QlpFactors(Q=Q, L=inner.L, P=inner.P,
                      pivoted_second=inner.pivoted_second, R0=inner.R0)


def rqlp(A, cfg, block_size=DEFAULT_BLOCK_SIZE):
    """Two-pass randomized QLP.

    Y = A Omega, V = qr(Y), B = V^T A, [Qh, L, P] = QLP(B), Q = V Qh.
    """
    src = _as_source(A, block_size)
    m, n = src.shape
    cfg.check((m, n))
    t0 = time.perf_counter()
    gauss = SeededGaussianSource(cfg.seed)
    omega = gaussian_matrix(gauss, n, cfg.l1)

    Y = np.empty((m, cfg.l1), order="F")
    for start, block in src.stream():
        Y[start:start + block.shape[0], :] = matmul(block, omega)
    V = qr_unpivoted(Y).Q

    Vt = transpose(V)
    B = np.zeros((cfg.l1, n), order="F")
    for start, block in src.stream():
        matmul_into(B, Vt[:, start:start + block.shape[0]], block)

    factors = _finish(V, B, cfg)
    return RandQlpResult(factors, cfg, "rqlp", time.perf_counter() - t0, V, B)


def sprqlp(A, cfg, block_size=DEFAULT_BLOCK_SIZE):
    """Single-pass randomized QLP.

    One sweep over the row blocks of A forms both Y1 = A Omega1 and
    Y2 = Omega2 A; afterwards B = (Omega2 V)^+ Y2 with V = qr(Y1).

    Raises
    ------
    RankDeficientError
        If Omega2 V is numerically rank deficient.
    """
    src = _as_source(A, block_size)
    m, n = src.shape
    cfg.check((m, n))
    t0 = time.perf_counter()
    gauss = SeededGaussianSource(cfg.seed)
    omega1 = gaussian_matrix(gauss, n, cfg.l1)
    omega2 = gaussian_matrix(gauss, cfg.l2, m)

    Y1 = np.empty((m, cfg.l1), order="F")
    Y2 = np.zeros((cfg.l2, n), order="F")
    for start, block in src.stream():
        stop = start + block.shape[0]
        Y1[start:stop, :] = matmul(block, omega1)
        matmul_into(Y2, omega2[:, start:stop], block)

    V = qr_unpivoted(Y1).Q
    B = matmul(pinv_tall(matmul(omega2, V), rtol=PINV_RTOL), Y2)
    factors = _finish(V, B, cfg)
    return RandQlpResult(factors, cfg, "sprqlp", time.perf_counter() - t0, V, B)


def _truncated_pinv(M, rtol):
    U, s, W = jacobi_svd(M, compute_uv=True)
    keep = s > rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    return matmul(W[:, keep] / s[keep], transpose(U[:, keep]))


def sorqlp(A, cfg, block_size=DEFAULT_BLOCK_SIZE, strict=False):
    """Subspace-orbit single-pass randomized QLP.

    The second test matrix is the first sketch itself: Y2 = Y1^T A.  Both
    sketches come out of one sweep because, for a row block A_b,
    Y1^T A = sum_b (A_b Omega)^T A_b.  Then B = (Y1^T V)^+ Y2.

    When Y1^T V = R^T is numerically singular (A of rank below l1) a
    :class:`RankDeficientWarning` is issued and a pseudoinverse truncated
    at relative tolerance 1e-12 is used; ``strict=True`` raises
    :class:`RankDeficientError` instead.
    """
    src = _as_source(A, block_size)
    m, n = src.shape
    cfg.check((m, n))
    t0 = time.perf_counter()
    gauss = SeededGaussianSource(cfg.seed)
    omega = gaussian_matrix(gauss, n, cfg.l1)

    Y1 = np.empty((m, cfg.l1), order="F")
    Y2 = np.zeros((cfg.l1, n), order="F")
    for start, block in src.stream():
        S = matmul(block, omega)
        Y1[start:start + block.shape[0], :] = S
        matmul_into(Y2, transpose(S), block)

    V = qr_unpivoted(Y1).Q
    core = matmul(transpose(Y1), V)
    try:
        pinv = pinv_tall(core, rtol=PINV_RTOL)
    except RankDeficientError as exc:
        if strict:
            raise
        warnings.warn(f"SORQLP sketch is rank deficient (ratio {exc.ratio:.3e}); "
                      "using a truncated pseudoinverse", RankDeficientWarning, stacklevel=2)
        pinv = _truncated_pinv(core, PINV_RTOL)
    B = matmul(pinv, Y2)
    factors = _finish(V, B, cfg)
    return RandQlpResult(factors, cfg, "sorqlp", time.perf_counter() - t0, V, B)


ALGORITHMS = {"rqlp": rqlp, "sprqlp": sprqlp, "sorqlp": sorqlp}
