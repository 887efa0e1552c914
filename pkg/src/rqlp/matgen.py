"""Synthetic test matrices: prescribed spectra and Galerkin-discretized kernels."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import PreconditionError, matmul, transpose
from .qr import qr_unpivoted
from .rng import SeededGaussianSource, gaussian_matrix

GAUSS_NODES = 16
CELL_TOL = 1e-13
MAX_REFINE_DEPTH = 12


@dataclass(frozen=True)
class SpectrumSpec:
    """``A = U diag(sigmas) V^T`` with a flat prefix of t ones.

    pds: 1 (t times), 2^-s, 3^-s, ..., (n-t+1)^-s
    eds: 1 (t times), 2^-s, 2^-2s, ..., 2^-(n-t)s
    """

    family: str
    n: int
    t: int
    s: float
    seed: int = 0

    def __post_init__(self):
        if self.family not in ("pds", "eds"):
            raise PreconditionError(f"unknown spectrum family {self.family!r}")
        if not 1 <= self.t <= self.n:
            raise PreconditionError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")
        if not self.s > 0:
            raise PreconditionError(f"decay rate s must be positive, got {self.s}")

    def sigmas(self):
        tail = np.arange(2, self.n - self.t + 2, dtype=np.float64)
        if self.family == "pds":
            decay = tail ** -self.s
        else:
            decay = 2.0 ** (-(tail - 1.0) * self.s)
        return np.concatenate([np.ones(self.t), decay])


@dataclass(frozen=True)
class KernelSpec:
    """Galerkin matrix of a first-kind Fredholm operator on [0, 1].

    ``kappa`` only affects the heat kernel.
    """

    family: str
    n: int
    kappa: float = 1.0

    def __post_init__(self):
        if self.family not in ("heat", "deriv2"):
            raise PreconditionError(f"unknown kernel family {self.family!r}")
        if self.n < 2:
            raise PreconditionError(f"n must be >= 2, got {self.n}")


def gen_spectrum_matrix(spec):
    """Return ``(A, sigmas)`` for a :class:`SpectrumSpec`.

    U and V are the Q factors of two seeded n x n Gaussian matrices (U drawn
    first), so the construction is reproducible from ``spec.seed``.
    """
    gauss = SeededGaussianSource(spec.seed)
    U = qr_unpivoted(gaussian_matrix(gauss, spec.n, spec.n)).Q
    V = qr_unpivoted(gaussian_matrix(gauss, spec.n, spec.n)).Q
    sigmas = spec.sigmas()
    A = matmul(np.asfortranarray(U * sigmas), transpose(V))
    return A, sigmas


def deriv2_kernel(y, z):
    """Green's function of u'' on [0, 1] with u(0) = u(1) = 0."""
    return np.where(y <= z, y * (z - 1.0), z * (y - 1.0))


def heat_kernel(y, z, kappa=1.0):
    """Inverse heat-equation kernel k(y - z), zero for z >= y."""
    d = np.asarray(y - z, dtype=np.float64)
    out = np.zeros_like(d)
    pos = d > 0
    dp = d[pos]
    out[pos] = dp ** -1.5 / (2.0 * kappa * np.sqrt(np.pi)) * np.exp(-1.0 / (4.0 * kappa**2 * dp))
    return out


def _cell_nodes(n, nodes):
    # Gauss-Legendre abscissae / weights mapped onto each of the n cells.
    x, w = np.polynomial.legendre.leggauss(nodes)
    h = 1.0 / n
    left = np.arange(n) * h
    pts = left[:, None] + 0.5 * h * (x + 1.0)
    return pts, 0.5 * h * w


def _tensor(f, y0, y1, z0, z1, x, w):
    y = 0.5 * (y1 - y0) * (x + 1.0) + y0
    z = 0.5 * (z1 - z0) * (x + 1.0) + z0
    F = f(y[:, None], z[None, :])
    return 0.25 * (y1 - y0) * (z1 - z0) * (w @ F @ w)


def _adaptive(f, y0, y1, z0, z1, x, w, tol, depth=0):
    # Composite refinement of the tensor rule until halving agrees to tol.
    whole = _tensor(f, y0, y1, z0, z1, x, w)
    ym = 0.5 * (y0 + y1)
    zm = 0.5 * (z0 + z1)
    quads = [(y0, ym, z0, zm), (y0, ym, zm, z1), (ym, y1, z0, zm), (ym, y1, zm, z1)]
    parts = [_tensor(f, *q, x, w) for q in quads]
    if abs(sum(parts) - whole) <= tol or depth >= MAX_REFINE_DEPTH:
        return sum(parts)
    return sum(_adaptive(f, *q, x, w, tol / 4.0, depth + 1) for q in quads)


def _cell_integral(kernel, i, j, h, x, w, tol):
    a, b = i * h, j * h
    if i != j:
        return _adaptive(kernel, a, a + h, b, b + h, x, w, tol)

    # split the diagonal cell along y = z; collapse each triangle onto a
    # square through z = a + (y - a) u so a kink on the diagonal is harmless
    def lower(y, u):
        return kernel(y, a + (y - a) * u) * (y - a)

    def upper(y, u):
        return kernel(a + (y - a) * u, y) * (y - a)

    return (_adaptive(lower, a, a + h, 0.0, 1.0, x, w, tol / 2)
            + _adaptive(upper, a, a + h, 0.0, 1.0, x, w, tol / 2))


def _galerkin(kernel, n, nodes, toeplitz):
    h = 1.0 / n
    x, wq = np.polynomial.legendre.leggauss(nodes)
    tol = CELL_TOL * h
    if toeplitz:
        # a_ij depends only on i - j
        first_row = [_cell_integral(kernel, 0, j, h, x, wq, tol) for j in range(n)]
        first_col = [_cell_integral(kernel, i, 0, h, x, wq, tol) for i in range(n)]
        return np.asfortranarray(scipy.linalg.toeplitz(first_col, first_row)) / h

    pts, w = _cell_nodes(n, nodes)
    A = np.zeros((n, n), order="F")
    for i in range(n):
        K = kernel(pts[i][:, None, None], pts[None, :, :])
        A[i, :] = np.einsum("a,ajb,b->j", w, K, w)
    # cells touching the diagonal get the careful treatment
    for i in range(n):
        for j in range(max(0, i - 1), min(n, i + 2)):
            A[i, j] = _cell_integral(kernel, i, j, h, x, wq, tol)
    return A / h


def gen_kernel_matrix(spec, nodes=GAUSS_NODES):
    """Galerkin matrix ``a_ij = <chi_i, K chi_j>`` for normalized box functions.

    Cells use an ``nodes x nodes`` tensor Gauss-Legendre rule.  Cells on or
    next to the diagonal are refined adaptively (composite halving until the
    cell integral settles to ~1e-13), and diagonal cells are split along
    y = z with a collapsed rule on each triangle so kernels with a kink or
    an essential singularity at y = z stay accurate.
    """
    if spec.family == "deriv2":
        return _galerkin(deriv2_kernel, spec.n, nodes, toeplitz=False)

    def kernel(y, z):
        return heat_kernel(y, z, spec.kappa)

    return _galerkin(kernel, spec.n, nodes, toeplitz=True)
