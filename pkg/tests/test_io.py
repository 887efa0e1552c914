import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqlp import io


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32))
def test_matrix_roundtrip(tmp_path_factory, m, n, seed):
    path = tmp_path_factory.mktemp("m") / "a.rqlpmat"
    A = np.random.default_rng(seed).standard_normal((m, n)) * 10.0 ** np.random.default_rng(seed).integers(-300, 300)
    io.write_matrix(path, A)
    B = io.read_matrix(path)
    assert np.array_equal(A, B) and B.flags.f_contiguous


def test_binary_layout(tmp_path):
    path = tmp_path / "a.rqlpmat"
    A = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    io.write_matrix(path, A)
    data = path.read_bytes()
    assert data[:8] == b"RQLPMAT1"
    assert struct.unpack("<QQQ", data[8:32]) == (1, 2, 3)
    assert np.array_equal(np.frombuffer(data[32:], "<f8"), [1, 4, 2, 5, 3, 6])


@pytest.mark.parametrize("mutate", [lambda d: b"XXXXXXXX" + d[8:], lambda d: d[:-8],
                                    lambda d: d[:8] + struct.pack("<Q", 2) + d[16:], lambda d: d[:10]])
def test_bad_files_rejected(tmp_path, mutate):
    path = tmp_path / "a.rqlpmat"
    io.write_matrix(path, np.eye(2))
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(io.FormatError):
        io.read_matrix(path)


def test_meta_roundtrip(tmp_path):
    sig = np.array([1.0, 1 / 3, 1e-300])
    io.write_meta(tmp_path / "x.meta", {"family": "pds", "n": 3, "sigmas": sig})
    meta = io.read_meta(tmp_path / "x.meta")
    assert meta["family"] == "pds" and meta["n"] == "3"
    assert np.array_equal(io.meta_sigmas(meta), sig)
    assert io.meta_sigmas({}) is None


def test_records_roundtrip(tmp_path):
    recs = [io.ExperimentRecord("sprqlp", "pds", 100, 20, 5, 25, 40, 3, "ok", 0.1 / 3, 0.25,
                                sv=[(1, 1.0, 0.999, 0.001, 0.001)]),
            io.ExperimentRecord("rqlp", "heat", 50, 10, 5, 15, 20, 0, "rank_deficient", math.nan, math.nan)]
    path = tmp_path / "r.csv"
    io.write_records(path, recs[:1])
    io.write_records(path, recs[1:], append=True)
    lines = path.read_text().splitlines()
    assert lines[0] == "schema,algorithm,family,n,k,p,l1,l2,seed,status,ef,elapsed_s"
    assert lines[2].startswith("sv,1,")
    back = io.read_records(path)
    assert back[0] == recs[0]
    assert back[1].status == "rank_deficient" and math.isnan(back[1].ef)


def test_bad_header(tmp_path):
    (tmp_path / "r.csv").write_text("a,b\n")
    with pytest.raises(io.FormatError):
        io.read_records(tmp_path / "r.csv")
