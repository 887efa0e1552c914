import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import low_rank, rand_matrix
from rqlp.core import PreconditionError, frobenius_norm, spectral_norm
from rqlp.matgen import SpectrumSpec, gen_spectrum_matrix
from rqlp.metrics import optimal_frobenius_error
from rqlp.qlp import qlp_decompose, reconstruct, truncate
from rqlp.svd import reference_svd


def test_diagonal():
    A = np.diag([3.0, 1.0, 2.0])
    F = qlp_decompose(A)
    assert np.allclose(np.abs(F.l_values), [3, 2, 1], atol=1e-15)
    assert frobenius_norm(A - reconstruct(F)) <= 1e-12 * frobenius_norm(A)


def test_identity():
    assert np.allclose(np.abs(qlp_decompose(np.eye(5)).l_values), 1, atol=1e-15)


def test_l_values_track_singular_values(rng):
    # smoke threshold on one fixed draw
    A = rand_matrix(np.random.default_rng(0), 20, 20)
    F = qlp_decompose(A)
    sig = reference_svd(A)
    assert np.all(np.abs(np.abs(F.l_values) - sig) <= 0.25 * sig)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 15), st.integers(1, 15), st.integers(0, 2**32), st.booleans())
def test_factor_invariants(m, n, seed, pivot_second):
    A = rand_matrix(np.random.default_rng(seed), m, n)
    F = qlp_decompose(A, pivot_second=pivot_second)
    r = min(m, n)
    assert F.Q.shape == (m, r) and F.L.shape == (r, r) and F.P.shape == (n, r)
    assert frobenius_norm(F.Q.T @ F.Q - np.eye(r)) <= 1e-12 * np.sqrt(r)
    assert frobenius_norm(F.P.T @ F.P - np.eye(r)) <= 1e-12 * np.sqrt(r)
    assert np.all(np.triu(F.L, 1) == 0)
    assert frobenius_norm(A - reconstruct(F)) <= 1e-12 * frobenius_norm(A)
    l11 = abs(F.L[0, 0])
    assert l11 <= spectral_norm(A) * (1 + 1e-10)
    assert l11 >= abs(F.R0[0, 0]) / np.sqrt(r) * (1 - 1e-12)


def test_truncate_full_and_exact_rank(rng):
    A = rand_matrix(rng, 8, 6)
    F = qlp_decompose(A)
    assert frobenius_norm(A - reconstruct(F, 6)) <= 1e-12 * frobenius_norm(A)
    B = low_rank(rng, 10, 7, 2)
    assert frobenius_norm(B - reconstruct(qlp_decompose(B), 2)) <= 1e-10 * frobenius_norm(B)


def test_truncate_range(rng):
    F = qlp_decompose(rand_matrix(rng, 5, 4))
    for k in (0, 5):
        with pytest.raises(PreconditionError):
            truncate(F, k)
    Qk, Lk, Pk = truncate(F, 2)
    assert Qk.shape == (5, 2) and Lk.shape == (2, 2) and Pk.shape == (4, 2)


def test_truncation_error_nonincreasing(rng):
    A = rand_matrix(rng, 12, 10)
    F = qlp_decompose(A)
    errs = [frobenius_norm(A - reconstruct(F, k)) for k in range(1, 11)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(errs, errs[1:]))


def test_pds_tail_ratio():
    A, sig = gen_spectrum_matrix(SpectrumSpec("pds", 100, 10, 2.0))
    F = qlp_decompose(A)
    ef = frobenius_norm(A - reconstruct(F, 10)) / frobenius_norm(A)
    assert ef / optimal_frobenius_error(sig, 10) <= 3


def test_deterministic(rng):
    A = rand_matrix(rng, 30, 25)
    a, b = qlp_decompose(A), qlp_decompose(A)
    assert np.array_equal(a.Q, b.Q) and np.array_equal(a.L, b.L) and np.array_equal(a.P, b.P)
