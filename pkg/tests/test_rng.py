import numpy as np
import pytest

from rqlp.rng import SeededGaussianSource, gaussian_matrix


def test_same_seed_identical():
    a = gaussian_matrix(SeededGaussianSource(7), 5, 3)
    b = gaussian_matrix(SeededGaussianSource(7), 5, 3)
    assert np.array_equal(a, b)
    assert a.flags.f_contiguous


def test_different_seeds_differ():
    assert not np.array_equal(gaussian_matrix(SeededGaussianSource(1), 4, 4),
                              gaussian_matrix(SeededGaussianSource(2), 4, 4))


def test_column_major_fill():
    flat = SeededGaussianSource(3).normals(6)
    M = gaussian_matrix(SeededGaussianSource(3), 3, 2)
    assert np.array_equal(M[:, 0], flat[:3]) and np.array_equal(M[:, 1], flat[3:])


def test_stream_position_after_two_matrices():
    src = SeededGaussianSource(11)
    gaussian_matrix(src, 4, 4)
    gaussian_matrix(src, 2, 2)
    assert src.draws == 20
    nxt = src.normals(1)[0]
    assert nxt == SeededGaussianSource(11).normals(21)[20]


def test_split_streams_independent():
    base = SeededGaussianSource(5)
    a, b = base.split(1).normals(50), base.split(2).normals(50)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, SeededGaussianSource(5, stream=1).normals(50))


def test_moments_and_quantile():
    x = SeededGaussianSource(12345).normals(100_000)
    assert abs(x.mean()) < 0.02
    assert abs(x.var() - 1) < 0.05
    assert abs(np.mean(np.abs(x) > 1.96) - 0.05) < 0.01


def test_box_muller_formula():
    # two raw words per draw, cosine branch
    src = SeededGaussianSource(9)
    words = src._bitgen.random_raw(4)
    u1 = ((words[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (words[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    expect = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    assert np.array_equal(SeededGaussianSource(9).normals(2), expect)


def test_bad_arguments():
    with pytest.raises(ValueError):
        SeededGaussianSource(-1)
    with pytest.raises(ValueError):
        SeededGaussianSource(2**64)
    with pytest.raises(ValueError):
        gaussian_matrix(SeededGaussianSource(0), 0, 3)
