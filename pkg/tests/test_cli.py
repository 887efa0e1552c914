import numpy as np
import pytest

from rqlp import io
from rqlp.cli import main


def _data(rec):
    # everything except the wall-clock column
    return (rec.algorithm, rec.family, rec.n, rec.k, rec.p, rec.l1, rec.l2, rec.seed,
            rec.status, rec.ef, rec.sv)


def test_gen_size_and_determinism(tmp_path):
    a, b = tmp_path / "a.rqlpmat", tmp_path / "b.rqlpmat"
    for p in (a, b):
        assert main(["gen", "--family", "pds", "--n", "100", "--t", "10", "--s", "2", "--out", str(p)]) == 0
    assert a.stat().st_size == 8 * 100 * 100 + 32
    assert a.read_bytes() == b.read_bytes()
    meta = io.read_meta(io.meta_path(a))
    assert meta["family"] == "pds" and len(io.meta_sigmas(meta)) == 100


def test_gen_kernel(tmp_path):
    out = tmp_path / "h.rqlpmat"
    assert main(["gen", "--family", "heat", "--n", "20", "--out", str(out)]) == 0
    assert io.read_matrix(out).shape == (20, 20)
    assert io.meta_sigmas(io.read_meta(io.meta_path(out))) is None


def test_run_qlp_diagonal_exact(tmp_path):
    path = tmp_path / "d.rqlpmat"
    io.write_matrix(path, np.diag(np.arange(50, 0, -1.0)))
    csv = tmp_path / "r.csv"
    assert main(["run", str(path), "--algo", "qlp", "--k", "50", "--out", str(csv)]) == 0
    rec, = io.read_records(csv)
    assert rec.ef <= 1e-12 and (rec.p, rec.l1, rec.l2) == (0, 50, 50)


def test_run_defaults_and_determinism(tmp_path):
    mat = tmp_path / "a.rqlpmat"
    main(["gen", "--family", "pds", "--n", "120", "--t", "10", "--s", "2", "--out", str(mat)])
    csv = tmp_path / "r.csv"
    for _ in range(2):
        assert main(["run", str(mat), "--algo", "sprqlp", "--k", "20", "--seed", "4", "--sv", "5",
                     "--out", str(csv)]) == 0
    a, b = io.read_records(csv)
    assert (a.k, a.p, a.l1, a.l2) == (20, 5, 25, 40)
    assert len(a.sv) == 5
    assert _data(a) == _data(b)


def test_run_rank_deficient_record(tmp_path):
    mat = tmp_path / "z.rqlpmat"
    rng = np.random.default_rng(0)
    io.write_matrix(mat, rng.standard_normal((40, 3)) @ rng.standard_normal((3, 30)))
    csv = tmp_path / "r.csv"
    assert main(["run", str(mat), "--algo", "sorqlp", "--k", "5", "--out", str(csv)]) == 0
    rec, = io.read_records(csv)
    assert rec.status == "rank_deficient" and rec.ef <= 1e-8


def test_sweep_cardinality_order_and_monotone(tmp_path):
    csv = tmp_path / "s.csv"
    assert main(["sweep", "--family", "pds", "--n", "80", "--t", "10", "--s", "2", "--k", "5",
                 "--seed", "0", "1", "2", "--algo", "rqlp", "--out", str(csv)]) == 0
    assert len(io.read_records(csv)) == 3
    csv2 = tmp_path / "s2.csv"
    assert main(["sweep", "--family", "pds", "--n", "80", "--t", "10", "--s", "2",
                 "--k", "20", "5", "10", "--seed", "1", "0", "--algo", "sprqlp", "--algo", "qlp",
                 "--out", str(csv2)]) == 0
    recs = io.read_records(csv2)
    keys = [r.sort_key() for r in recs]
    assert keys == sorted(keys) and len(recs) == 12
    qlp = [r.ef for r in recs if r.algorithm == "qlp" and r.seed == 0]
    assert all(b <= a for a, b in zip(qlp, qlp[1:]))


def test_sweep_continues_after_invalid_cell(tmp_path):
    csv = tmp_path / "s.csv"
    assert main(["sweep", "--family", "pds", "--n", "30", "--t", "5", "--s", "2", "--k", "5", "40",
                 "--algo", "rqlp", "--out", str(csv)]) == 0
    assert [r.status for r in io.read_records(csv)] == ["ok", "invalid"]


def test_sweep_deterministic(tmp_path):
    out = []
    for name in ("a.csv", "b.csv"):
        main(["sweep", "--n", "60", "--t", "5", "--s", "1", "--k", "5", "10", "--seed", "0", "1",
              "--out", str(tmp_path / name)])
        out.append([_data(r) for r in io.read_records(tmp_path / name)])
    assert out[0] == out[1]


def _bounds_csv(capsys):
    lines = [l[4:] for l in capsys.readouterr().out.splitlines() if l.startswith("csv=")]
    header = lines[0].split(",")
    return [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_bounds_exact_rank_zero(tmp_path, capsys):
    sig = tmp_path / "s.txt"
    sig.write_text(" ".join(["1"] * 10 + ["0"] * 40))
    assert main(["bounds", "--sigmas", str(sig), "--k", "10"]) == 0
    for row in _bounds_csv(capsys):
        assert float(row["spectral"]) == float(row["frobenius"]) == 0


def test_bounds_delta_monotone(capsys):
    vals = []
    for d in ("0.01", "0.1"):
        main(["bounds", "--family", "pds", "--n", "200", "--t", "30", "--s", "2", "--k", "40",
              "--delta", d, "--algo", "sprqlp"])
        vals.append(float(_bounds_csv(capsys)[0]["frobenius"]))
    assert vals[0] >= vals[1]


def test_bounds_report_vs_oracle(capsys, tmp_path):
    import oracles as orc
    from rqlp.matgen import SpectrumSpec
    from rqlp import bounds as bd
    out = tmp_path / "b.csv"
    assert main(["bounds", "--family", "pds", "--n", "200", "--t", "30", "--s", "2", "--k", "40",
                 "--sv-index", "3", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "assumption[l1 > (1+1/ln k) k]=VIOLATED" in text
    sig = SpectrumSpec("pds", 200, 30, 2.0).sigmas()
    p = bd.sketch_params(1.0, [(200, 45), (80, 45)])
    ref = orc.mp_sprqlp_bounds(sig, 200, 200, 40, 45, 80, p.a1, p.c1, 0.01)
    rows = out.read_text().splitlines()
    header = rows[0].split(",")
    row = dict(zip(header, rows[1].split(",")))
    assert row["algorithm"] == "sprqlp"
    for name in ("spectral", "frobenius", "spectral_alt", "c_delta"):
        assert orc.rel(float(row[name]), ref[name]) <= 1e-12


def test_bad_inputs_exit_nonzero(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.rqlpmat"), "--out", str(tmp_path / "r.csv")]) == 1
    bad = tmp_path / "bad.rqlpmat"
    bad.write_bytes(b"nope")
    assert main(["run", str(bad), "--out", str(tmp_path / "r.csv")]) == 1
    assert main(["gen", "--family", "pds", "--n", "10", "--t", "20", "--out", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit):
        main(["run"])
