"""Command-line harness: generate matrices, run decompositions, sweep, evaluate bounds."""
import argparse
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import bounds as bd
from . import io
from .core import PreconditionError, RankDeficientError, RankDeficientWarning
from .matgen import KernelSpec, SpectrumSpec, gen_kernel_matrix, gen_spectrum_matrix
from .metrics import error_metrics
from .qlp import qlp_decompose
from .randqlp import ALGORITHMS, DEFAULT_BLOCK_SIZE, SketchConfig
from .svd import reference_svd

SPECTRUM_FAMILIES = ("pds", "eds")
KERNEL_FAMILIES = ("heat", "deriv2")
BOUNDS_HEADER = ["schema", "algorithm", "n", "m", "k", "p", "l1", "l2", "delta", "a2",
                 "spectral", "spectral_floor", "frobenius", "frobenius_floor",
                 "spectral_alt", "spectral_alt_floor", "c_delta"]


def _bool(text):
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_matrix(family, n, t=None, s=None, seed=0, kappa=1.0):
    """Return ``(A, sigmas_or_None, meta)`` for a family name and parameters."""
    if family in SPECTRUM_FAMILIES:
        if t is None or s is None:
            raise PreconditionError(f"family {family} needs --t and --s")
        A, sig = gen_spectrum_matrix(SpectrumSpec(family, n, t, s, seed))
        meta = {"family": family, "n": n, "t": t, "s": s, "seed": seed, "sigmas": sig}
        return A, sig, meta
    if family in KERNEL_FAMILIES:
        A = gen_kernel_matrix(KernelSpec(family, n, kappa))
        return A, None, {"family": family, "n": n, "kappa": kappa}
    raise PreconditionError(f"unknown family {family!r}")


def run_one(A, algorithm, k, p=5, l2=None, seed=0, family="", sigmas=None,
            pivot_second=True, block_size=DEFAULT_BLOCK_SIZE, sv=0):
    """Run one decomposition and turn it into an :class:`io.ExperimentRecord`.

    ``sv`` is the number of leading singular-value error rows to attach.
    """
    m, n = A.shape
    if algorithm == "qlp":
        r = min(m, n)
        p_rec, l1, l2_rec = 0, r, r
    else:
        cfg = SketchConfig(k=k, p=p, l2=l2, seed=seed, pivot_second=pivot_second)
        p_rec, l1 = cfg.p, cfg.l1
        # SORQLP reuses the first sketch, so its second sketch has l1 rows
        l2_rec = l1 if algorithm == "sorqlp" else cfg.l2
    rec = io.ExperimentRecord(algorithm, family, n, k, p_rec, l1, l2_rec, seed,
                              "ok", float("nan"), float("nan"))
    try:
        if algorithm == "qlp":
            t0 = time.perf_counter()
            factors = qlp_decompose(A, pivot_second=pivot_second)
            rec.elapsed_s = time.perf_counter() - t0
        else:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", RankDeficientWarning)
                res = ALGORITHMS[algorithm](A, cfg, block_size=block_size)
            factors, rec.elapsed_s = res.factors, res.elapsed
            # a fallback pseudoinverse still yields factors, so metrics are kept
            if any(issubclass(w.category, RankDeficientWarning) for w in caught):
                rec.status = "rank_deficient"
    except RankDeficientError:
        rec.status = "rank_deficient"
        return rec
    met = error_metrics(A, factors, k, ref_sigmas=sigmas)
    rec.ef = met.ef
    for j in range(min(sv, k)):
        rec.sv.append((j + 1, met.sigma_ref[j], met.l_abs[j], met.ae[j], met.re[j]))
    return rec


def cmd_gen(args):
    A, _, meta = build_matrix(args.family, args.n, args.t, args.s, args.seed, args.kappa)
    io.write_matrix(args.out, A)
    io.write_meta(io.meta_path(args.out), meta)
    print(f"wrote {args.out} ({A.shape[0]}x{A.shape[1]})")
    return 0


def _load(path):
    A = io.read_matrix(path)
    mp = io.meta_path(path)
    meta = io.read_meta(mp) if mp.exists() else {}
    return A, io.meta_sigmas(meta), meta.get("family", Path(path).stem)


def cmd_run(args):
    A, sigmas, family = _load(args.matrix)
    if sigmas is None:
        sigmas = reference_svd(A)
    records = []
    for algo in args.algo or ["sprqlp"]:
        for seed in args.seed:
            records.append(run_one(A, algo, args.k[0], args.p, args.l2, seed, family, sigmas,
                                   args.pivot_second, args.block_size, args.sv))
    io.write_records(args.out, records, append=True)
    for rec in records:
        print(f"{rec.algorithm} k={rec.k} seed={rec.seed} status={rec.status} ef={rec.ef!r}")
    return 0


def cmd_sweep(args):
    if args.matrix:
        A, sigmas, family = _load(args.matrix)
    else:
        A, sigmas, _ = build_matrix(args.family, args.n, args.t, args.s, args.matrix_seed, args.kappa)
        family = args.family
    if sigmas is None:
        sigmas = reference_svd(A)
    cells = [(algo, k, seed) for algo in (args.algo or ["rqlp", "sprqlp", "sorqlp"])
             for k in args.k for seed in args.seed]
    records = []
    for algo, k, seed in sorted(cells):
        try:
            records.append(run_one(A, algo, k, args.p, args.l2, seed, family, sigmas,
                                   args.pivot_second, args.block_size, args.sv))
        except PreconditionError as exc:
            # an invalid cell is recorded and the sweep continues
            records.append(io.ExperimentRecord(algo, family, A.shape[1], k, args.p, 0, 0, seed,
                                               "invalid", float("nan"), float("nan")))
            print(f"{algo} k={k} seed={seed}: {exc}", file=sys.stderr)
    records.sort(key=io.ExperimentRecord.sort_key)
    io.write_records(args.out, records)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _read_sigmas(path):
    path = Path(path)
    if path.suffix == ".meta":
        sig = io.meta_sigmas(io.read_meta(path))
        if sig is None:
            raise PreconditionError(f"{path} holds no sigmas")
        return sig
    if path.suffix == ".rqlpmat":
        return reference_svd(io.read_matrix(path))
    return np.array([float(v) for v in path.read_text().replace(",", " ").split()])


def bounds_report(sigmas, m, n, k, p, l2, delta, a2, algorithm):
    """Evaluate the matrix-error bounds; returns ``(params, MatrixErrorBounds, l1, l2)``."""
    l1 = k + p
    if algorithm == "sprqlp":
        l2 = max(2 * k, l1) if l2 is None else l2
        params = bd.sketch_params(a2, [(n, l1), (l2, l1)], delta)
        rep = bd.thm_matrix_error_sprqlp(sigmas, m, n, k, l1, l2, params, delta)
    else:
        l2 = l1
        params = bd.sketch_params(a2, [(n, l1)], delta)
        rep = bd.thm_matrix_error_sorqlp(sigmas, n, k, l1, params, delta)
    return params, rep, l1, l2


def cmd_bounds(args):
    if args.sigmas:
        sigmas = np.sort(_read_sigmas(args.sigmas))[::-1]
        n = args.n or len(sigmas)
    else:
        A, sigmas, _ = build_matrix(args.family, args.n, args.t, args.s, args.matrix_seed, args.kappa)
        if sigmas is None:
            sigmas = reference_svd(A)
        n = args.n
    m = args.m or n
    k = args.k[0]
    rows = []
    for algo in args.algo or ["sprqlp", "sorqlp"]:
        if algo not in ("sprqlp", "sorqlp"):
            raise PreconditionError(f"bounds exist only for sprqlp and sorqlp, not {algo}")
        params, rep, l1, l2 = bounds_report(sigmas, m, n, k, args.p, args.l2, args.delta, args.a2, algo)
        print(f"[{algo}]")
        print(f"mu={params.mu!r}\na1={params.a1!r}\na2={params.a2!r}\nc1={params.c1!r}\nc2={params.c2!r}")
        print(f"l1={l1}\nl2={l2}\ndelta={args.delta!r}\nc_delta={rep.c_delta!r}")
        for name in ("spectral", "frobenius", "spectral_alt"):
            b = getattr(rep, name)
            shown = max(b.probability_floor, 0.0)
            print(f"{name}={b.bound_value!r}\n{name}_floor={b.probability_floor!r}"
                  f"\n{name}_floor_display={shown:.6g}")
        for pred, ok in rep.spectral.assumptions_met.items():
            print(f"assumption[{pred}]={'met' if ok else 'VIOLATED'}")
        for j in args.sv_index or []:
            env = bd.singular_value_envelope(sigmas, m, n, k, l1, l2, params, j, args.delta, algo)
            print(f"envelope[{j}]=lower:{env.lower!r},upper:{env.upper!r},C:{env.C!r},rho:{env.rho!r}")
        rows.append([str(v) for v in (io.SCHEMA, algo, n, m, k, args.p, l1, l2, repr(args.delta), repr(args.a2),
                                      repr(rep.spectral.bound_value), repr(rep.spectral.probability_floor),
                                      repr(rep.frobenius.bound_value), repr(rep.frobenius.probability_floor),
                                      repr(rep.spectral_alt.bound_value),
                                      repr(rep.spectral_alt.probability_floor), repr(rep.c_delta))])
    print("csv=" + ",".join(BOUNDS_HEADER))
    for r in rows:
        print("csv=" + ",".join(r))
    if args.out:
        path = Path(args.out)
        new = not path.exists() or path.stat().st_size == 0
        with open(path, "a") as fh:
            if new:
                fh.write(",".join(BOUNDS_HEADER) + "\n")
            for r in rows:
                fh.write(",".join(r) + "\n")
    return 0


def _add_matrix_flags(p, n_default=500):
    p.add_argument("--family", default="pds", choices=SPECTRUM_FAMILIES + KERNEL_FAMILIES)
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--t", type=int, default=30)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=1.0)


def _add_sketch_flags(p, multi):
    nargs = "+" if multi else 1
    p.add_argument("--k", type=int, nargs=nargs, default=[20])
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--l2", type=int, default=None)
    p.add_argument("--seed", type=int, nargs="+", default=[0])
    p.add_argument("--algo", action="append", choices=["qlp"] + sorted(ALGORITHMS))
    p.add_argument("--pivot-second", type=_bool, default=True, metavar="{true,false}")
    p.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    p.add_argument("--sv", type=int, default=0, help="number of singular-value error rows per record")


def make_parser():
    ap = argparse.ArgumentParser(prog="rqlp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a test matrix and its .meta sidecar")
    _add_matrix_flags(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="decompose a stored matrix and append CSV records")
    r.add_argument("matrix")
    _add_sketch_flags(r, multi=False)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="cross product of algorithms, ranks and seeds")
    s.add_argument("--matrix", default=None, help="stored .rqlpmat instead of generating one")
    _add_matrix_flags(s)
    s.add_argument("--matrix-seed", type=int, default=0)
    _add_sketch_flags(s, multi=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bounds", help="evaluate the probabilistic error bounds")
    _add_matrix_flags(b, n_default=None)
    b.add_argument("--matrix-seed", type=int, default=0)
    b.add_argument("--sigmas", default=None, help=".meta, .rqlpmat or plain text list of singular values")
    b.add_argument("--m", type=int, default=None, help="row count (defaults to n)")
    b.add_argument("--k", type=int, nargs=1, default=[20])
    b.add_argument("--p", type=int, default=5)
    b.add_argument("--l2", type=int, default=None)
    b.add_argument("--delta", type=float, default=0.01)
    b.add_argument("--a2", type=float, default=1.0)
    b.add_argument("--algo", action="append", choices=["sprqlp", "sorqlp"])
    b.add_argument("--sv-index", type=int, action="append", help="j for a singular-value envelope")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None):
    ap = make_parser()
    args = ap.parse_args(argv)
    if getattr(args, "command", None) == "bounds" and not args.sigmas and args.n is None:
        args.n = 500
    try:
        return args.func(args)
    except (OSError, io.FormatError) as exc:
        print(f"rqlp: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"rqlp: invalid arguments: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
