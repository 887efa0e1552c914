"""QLP decomposition and single-pass randomized variants."""
from .core import (ConvergenceFailure, Permutation, PreconditionError, RankDeficientError,
                   RankDeficientWarning, frobenius_norm, matmul, spectral_norm)
from .qr import pinv_tall, qr_unpivoted, qrcp
from .svd import jacobi_svd, reference_svd
from .qlp import QlpFactors, qlp_decompose, reconstruct, truncate
from .randqlp import MatrixSource, RandQlpResult, SketchConfig, rqlp, sorqlp, sprqlp
from .matgen import KernelSpec, SpectrumSpec, gen_kernel_matrix, gen_spectrum_matrix
from .metrics import ErrorMetrics, error_metrics, optimal_frobenius_error
from .rng import SeededGaussianSource, gaussian_matrix

__version__ = "0.1.0"
