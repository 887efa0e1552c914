"""Closed-form constants and probabilistic error bounds for SPRQLP / SORQLP.

Everything here works on a spectrum (array of singular values, descending)
rather than on a matrix, so the evaluators can be fed either a known
synthetic spectrum or the output of :func:`rqlp.svd.reference_svd`.

Probability floors are returned exactly as the formulas give them; at
desk-scale sizes they are frequently negative (vacuous).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PreconditionError
from .svd import reference_svd

GAUSSIAN_MU = (4.0 / math.sqrt(2.0 * math.pi)) ** (1.0 / 3.0)
C_PRIME = math.sqrt(27.0 / 2.0**13)
C_DPRIME = 27.0 / 2.0**11


@dataclass(frozen=True)
class BoundParams:
    """Constants of the subgaussian class A(m, n, mu, a1, a2) plus c1, c2, Delta."""

    mu: float
    a1: float
    a2: float
    c1: float
    c2: float
    delta: float = 0.01

    def __post_init__(self):
        if not self.mu >= 1:
            raise PreconditionError(f"mu must be >= 1, got {self.mu}")
        if not (self.a1 > 0 and self.a2 > 0 and self.c1 > 0):
            raise PreconditionError("a1, a2 and c1 must be positive")
        if not 0 < self.delta < 1:
            raise PreconditionError(f"Delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class SsvConstants:
    """Constants of the smallest-singular-value estimate for a tall subgaussian matrix."""

    c_prime: float
    c_dprime: float
    c3: float
    b: float
    c1: float
    c2: float


@dataclass(frozen=True)
class BoundReport:
    bound_value: float
    probability_floor: float
    assumptions_met: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MatrixErrorBounds:
    """Spectral and Frobenius bounds on ||A - Q L P^T||.

    ``spectral_alt`` replaces the tail sum by sigma_{k+1}^2, giving a
    spectral-norm bound that shares the Frobenius bound's floor.
    """

    spectral: BoundReport
    frobenius: BoundReport
    spectral_alt: BoundReport
    c_delta: float


@dataclass(frozen=True)
class SingularValueEnvelope:
    j: int
    sigma: float
    lower: float
    upper: float
    C: float
    rho: float
    floor_lower: float
    floor_upper: float


@dataclass(frozen=True)
class PosterioriDiagnostics:
    """Computable quantities behind the interior singular-value estimates.

    ``remainder_prefactor`` is q^{5/2} ||R12||^2 / ((1 - rho1^2) sigma_s(L11)^2),
    unscaled by the unknown constant of the O(.) term.
    """

    s: int
    q: int
    rho1: float
    norm_R12: float
    norm_R22: float
    sigma_s_R11: float
    sigma_s_L11: float
    remainder_prefactor: float
    predicates: dict
    pivoted_second: bool


def subgaussian_a1(mu, a2):
    """Norm-tail constant a1 = 6 mu sqrt(a2 + 4)."""
    return 6.0 * mu * math.sqrt(a2 + 4.0)


def ssv_constants(mu, a1, a2, m, delta_ratio):
    """All constants of the smallest-singular-value estimate for an m x n
    subgaussian matrix with m = (1 + delta_ratio) n."""
    if not delta_ratio > 0:
        raise PreconditionError(f"delta_ratio must be positive, got {delta_ratio}")
    if m < 2:
        raise PreconditionError(f"m must be >= 2, got {m}")
    c3 = 4.0 * math.sqrt(2.0 / math.pi) * (2.0 * mu**9 / a1**3 + math.sqrt(math.pi))
    b = min(0.25, C_PRIME / (5.0 * a1 * mu**3))
    e2 = math.e**2
    c1 = b / (e2 * c3) * (b / (3.0 * e2 * c3 * a1)) ** (1.0 / delta_ratio)
    c2 = min(1.0, C_DPRIME / (2.0 * mu**6), a2) - math.log(3.0) / m
    return SsvConstants(C_PRIME, C_DPRIME, c3, b, c1, c2)


def c_constants(params, m, delta_ratio):
    """``(c1, c2)`` for the smallest-singular-value estimate.

    Only ``params.mu``, ``params.a1`` and ``params.a2`` are read.
    """
    lc = ssv_constants(params.mu, params.a1, params.a2, m, delta_ratio)
    return lc.c1, lc.c2


def gaussian_params(a2, m, delta_ratio, delta=0.01):
    """BoundParams for standard Gaussian sketches."""
    if not a2 > 0:
        raise PreconditionError(f"a2 must be positive, got {a2}")
    a1 = subgaussian_a1(GAUSSIAN_MU, a2)
    lc = ssv_constants(GAUSSIAN_MU, a1, a2, m, delta_ratio)
    return BoundParams(GAUSSIAN_MU, a1, a2, lc.c1, lc.c2, delta)


def sketch_params(a2, shapes, delta=0.01):
    """Gaussian BoundParams valid for every sketch shape ``(rows, cols)`` given.

    Each tall Gaussian factor gets its own (c1, c2) with m = rows and
    delta_ratio = rows / cols - 1; the smallest of each is kept, which
    keeps every smallest-singular-value estimate valid at once.
    """
    if not a2 > 0:
        raise PreconditionError(f"a2 must be positive, got {a2}")
    a1 = subgaussian_a1(GAUSSIAN_MU, a2)
    consts = [ssv_constants(GAUSSIAN_MU, a1, a2, rows, rows / cols - 1.0)
              for rows, cols in shapes]
    return BoundParams(GAUSSIAN_MU, a1, a2, min(c.c1 for c in consts),
                       min(c.c2 for c in consts), delta)


def c_delta(n, k, l, p, delta):
    """Tail constant bounding ||Omega2_hat|| ||Omega1_hat^+|| with probability 1 - Delta."""
    if not 0 < delta < 1:
        raise PreconditionError(f"Delta must lie in (0, 1), got {delta}")
    if not 0 <= p <= l - k:
        raise PreconditionError(f"need 0 <= p <= l - k, got p={p}, l={l}, k={k}")
    if l > n:
        raise PreconditionError(f"need l <= n, got l={l}, n={n}")
    lead = math.e * math.sqrt(l) / (p + 1) * (2.0 / delta) ** (1.0 / (p + 1))
    return lead * (math.sqrt(n - l + p) + math.sqrt(l) + math.sqrt(2.0 * math.log(2.0 / delta)))


def _spectrum(sigmas, k):
    s = np.asarray(sigmas, dtype=np.float64)
    if s.ndim != 1 or len(s) < k:
        raise PreconditionError(f"spectrum must hold at least k = {k} values")
    s1 = float(s[0])
    sk1 = float(s[k]) if len(s) > k else 0.0
    tail = float(np.sum(s[k:] ** 2))
    return s, s1, sk1, tail


def _projection_term(k, s1, sk1, cd, tail):
    # k s1^2 s_{k+1}^2 C^2 / (s_{k+1}^2 C^2 + s1^2) + tail
    if sk1 == 0.0:
        return tail
    num = k * s1**2 * sk1**2 * cd**2
    return num / (sk1**2 * cd**2 + s1**2) + tail


def _oversampled(l, r):
    return l > (1.0 + 1.0 / math.log(r)) * r


def _c_sprqlp(params, m, n, l1, l2, sk1):
    gamma = params.a1 * math.sqrt(m) / (params.c1 * math.sqrt(l2))
    root = math.sqrt(params.a1**2 * n / (params.c1**2 * l1) + 1.0)
    return gamma, root, 2.0 * gamma * root * sk1


def thm_matrix_error_sprqlp(sigmas, m, n, k, l1, l2, params, delta=None):
    """Matrix-approximation bounds for SPRQLP.

    Hypotheses l1 > (1 + 1/ln k) k and l2 > (1 + 1/ln l1) l1 are evaluated
    and reported in ``assumptions_met`` rather than enforced.
    """
    delta = params.delta if delta is None else delta
    s, s1, sk1, tail = _spectrum(sigmas, k)
    cd = c_delta(n, k, l1, l1 - k, delta)
    gamma, root, _ = _c_sprqlp(params, m, n, l1, l2, sk1)
    assumptions = {
        "l1 > (1+1/ln k) k": _oversampled(l1, k),
        "l2 > (1+1/ln l1) l1": _oversampled(l2, l1),
    }
    e = math.exp
    a2, c2 = params.a2, params.c2
    floor_2 = 1.0 - e(-a2 * m) - e(-a2 * n) - e(-c2 * l1) - e(-c2 * l2)
    floor_f = 1.0 - e(-a2 * m) - e(-c2 * l2) - delta
    spectral = 2.0 * (1.0 + gamma) * root * sk1
    frob = (1.0 + gamma) * math.sqrt(_projection_term(k, s1, sk1, cd, tail))
    alt = (1.0 + gamma) * math.sqrt(_projection_term(k, s1, sk1, cd, sk1**2))
    return MatrixErrorBounds(
        spectral=BoundReport(spectral, floor_2, assumptions),
        frobenius=BoundReport(frob, floor_f, assumptions),
        spectral_alt=BoundReport(alt, floor_f, assumptions),
        c_delta=cd,
    )


def thm_matrix_error_sorqlp(sigmas, n, k, l, params, delta=None):
    """Matrix-approximation bounds for SORQLP on a full-rank input."""
    delta = params.delta if delta is None else delta
    s, s1, sk1, tail = _spectrum(sigmas, k)
    cd = c_delta(n, k, l, l - k, delta)
    root = math.sqrt(params.a1**2 * n / (params.c1**2 * l) + 1.0)
    assumptions = {
        "l > (1+1/ln k) k": _oversampled(l, k),
        "A full rank": bool(np.all(s > 0)),
    }
    floor_2 = 1.0 - math.exp(-params.a2 * n) - math.exp(-params.c2 * l)
    floor_f = 1.0 - delta
    return MatrixErrorBounds(
        spectral=BoundReport(2.0 * root * sk1, floor_2, assumptions),
        frobenius=BoundReport(math.sqrt(_projection_term(k, s1, sk1, cd, tail)), floor_f, assumptions),
        spectral_alt=BoundReport(math.sqrt(_projection_term(k, s1, sk1, cd, sk1**2)), floor_f, assumptions),
        c_delta=cd,
    )


def rho(c_delta_value, sigma_k1, sigma_j):
    """sqrt(1 + C_Delta^2 (sigma_{k+1} / sigma_j)^2), evaluated for one j."""
    return math.sqrt(1.0 + c_delta_value**2 * (sigma_k1 / sigma_j) ** 2)


def singular_value_envelope(sigmas, m, n, k, l1, l2, params, j, delta=None, algorithm="sprqlp"):
    """Probabilistic envelope ``[lower, upper]`` for sigma_j(L), 1 <= j <= k.

    For SPRQLP: sigma_j / rho - C <= sigma_j(L) <= C + sigma_j.  For SORQLP
    C = 0 and the upper bound sigma_j holds deterministically (floor 1).
    rho is evaluated at the requested j.
    """
    delta = params.delta if delta is None else delta
    s, _, sk1, _ = _spectrum(sigmas, k)
    if not 1 <= j <= k:
        raise PreconditionError(f"need 1 <= j <= k, got j={j}, k={k}")
    sj = float(s[j - 1])
    if not sj > 0:
        raise PreconditionError(f"sigma_{j} must be positive")
    e = math.exp
    if algorithm == "sprqlp":
        cd = c_delta(n, k, l1, l1 - k, delta)
        C = _c_sprqlp(params, m, n, l1, l2, sk1)[2]
        floor_up = (1.0 - e(-params.a2 * m) - e(-params.a2 * n)
                    - e(-params.c2 * l1) - e(-params.c2 * l2))
        floor_low = floor_up - delta
    elif algorithm == "sorqlp":
        cd = c_delta(n, k, l1, l1 - k, delta)
        C = 0.0
        floor_up = 1.0
        floor_low = 1.0 - delta
    else:
        raise PreconditionError(f"unknown algorithm {algorithm!r}")
    r = rho(cd, sk1, sj)
    return SingularValueEnvelope(j=j, sigma=sj, lower=sj / r - C, upper=C + sj, C=C, rho=r,
                                 floor_lower=floor_low, floor_upper=floor_up)


def posteriori_diagnostics(factors, s):
    """Block quantities and hypothesis checks for a QLP of the core matrix B.

    ``factors`` must carry ``R0``; the partition is R0 = [[R11, R12], [0, R22]]
    and L = [[L11, 0], [L21, L22]] with s x s leading blocks.  The analysis
    these feed assumes ``pivoted_second=False``.
    """
    R0 = np.asarray(factors.R0)
    L = np.asarray(factors.L)
    q = min(R0.shape)
    if not 1 <= s < q:
        raise PreconditionError(f"need 1 <= s < {q}, got s={s}")
    sig_b = reference_svd(L)
    R11, R12, R22 = R0[:s, :s], R0[:s, s:], R0[s:, s:]
    L11, L22 = L[:s, :s], L[s:, s:]
    norm_R12 = float(reference_svd(R12)[0])
    norm_R22 = float(reference_svd(R22)[0])
    sigma_s_R11 = float(reference_svd(R11)[s - 1])
    sigma_s_L11 = float(reference_svd(L11)[s - 1])
    rho1 = float(reference_svd(L22)[0]) / sigma_s_L11 if sigma_s_L11 > 0 else math.inf
    if rho1 < 1 and sigma_s_L11 > 0:
        prefactor = q**2.5 * norm_R12**2 / ((1.0 - rho1**2) * sigma_s_L11**2)
    else:
        prefactor = math.inf
    predicates = {
        "sigma_s(B) > sigma_s+1(B)": bool(sig_b[s - 1] > sig_b[s]),
        "||R22|| <= sqrt((s+1)(q-s)) sigma_s+1(B)": bool(norm_R22 <= math.sqrt((s + 1) * (q - s)) * sig_b[s]),
        "sigma_s(R11) >= sigma_s(B)/sqrt(s(q-s+1))": bool(sigma_s_R11 >= sig_b[s - 1] / math.sqrt(s * (q - s + 1))),
        "||R22|| / sigma_s(R11) < 1": bool(sigma_s_R11 > 0 and norm_R22 / sigma_s_R11 < 1.0),
    }
    return PosterioriDiagnostics(s=s, q=q, rho1=rho1, norm_R12=norm_R12, norm_R22=norm_R22,
                                 sigma_s_R11=sigma_s_R11, sigma_s_L11=sigma_s_L11,
                                 remainder_prefactor=prefactor, predicates=predicates,
                                 pivoted_second=bool(factors.pivoted_second))
