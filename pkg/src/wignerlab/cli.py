"""Command-line front end.

One subcommand per library area; default output is JSON (CSV via
--format csv, 17 significant digits).  Errors map to exit codes:
2 usage, 3 domain, 4 size/budget, 5 numeric accuracy, each printed as a
single `error[kind]: message` line on stderr.  Stochastic subcommands
record seed, sample counts and library version in their metadata and
are bit-reproducible at a fixed thread count.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys


def _ints(text):
    return [int(v) for v in text.split(",") if v != ""]


def _floats(text):
    return [float(v) for v in text.split(",") if v != ""]


def _fmt(v):
    if isinstance(v, float):
        if v == int(v) and abs(v) < 1e16:
            return "%d" % int(v)
        return "%.17g" % v
    return str(v)


def _emit_scalar(args, payload: dict):
    payload = {k: v for k, v in payload.items() if v is not None}
    if args.format == "csv":
        keys = [k for k in payload if k != "meta"]
        lines = [",".join(keys),
                 ",".join(_fmt(payload[k]) for k in keys)]
        out = "\n".join(lines)
    else:
        out = json.dumps(payload)
    _write(args, out)


def _emit_rows(args, header, rows, meta=None):
    if args.format == "json":
        out = json.dumps({"rows": [dict(zip(header, r)) for r in rows],
                          **({"meta": meta} if meta else {})})
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in r) for r in rows]
        out = "\n".join(lines)
    _write(args, out)


def _write(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _meta_stochastic(seed, samples):
    from . import __version__

    return {"seed": seed, "samples": samples, "version": __version__}


# ----------------------------------------------------------------- handlers

def _cmd_poly_eval(args):
    from .errors import DomainError
    from .poly import hermite_h, tcheb_u

    fn = {"tcheb": tcheb_u, "hermite": hermite_h}.get(args.basis)
    if fn is None:
        raise DomainError("basis must be tcheb or hermite")
    v = float(fn(args.k, args.x))
    if args.format == "json":
        _write(args, json.dumps({"value": v}))
    else:
        _write(args, _fmt(v))
    return 0


def _cmd_poly_decompose(args):
    from .poly import decompose

    exp = decompose(_floats(args.coeffs), basis=args.basis)
    if args.format == "json":
        _write(args, json.dumps({
            "coefficients": {str(k): float(v) for k, v in sorted(exp.coeffs.items())},
            "rank": exp.rank, "basis": exp.basis}))
        return 0
    lines = ["degree,coefficient"]
    lines += ["%d,%s" % (k, _fmt(float(v))) for k, v in sorted(exp.coeffs.items())]
    lines.append("rank=%s" % ("none" if exp.rank is None else exp.rank))
    _write(args, "\n".join(lines))
    return 0


def _cmd_contractions(args):
    from .combinat import enumerate_contractions

    q = _ints(args.q)
    cvs = enumerate_contractions(tuple(q), scalar_only=args.scalar_only)
    p = len(q)
    header = ["r_%d" % i for i in range(1, p)]
    header += ["alpha_%d_%d" % (i + 1, j + 1)
               for i in range(p) for j in range(i + 1, p)]
    header.append("scalar")
    rows = []
    for cv in cvs:
        row = list(cv.r)
        row += [int(cv.alpha[i, j]) for i in range(p) for j in range(i + 1, p)]
        row.append(int(cv.scalar))
        rows.append(row)
    _emit_rows(args, header, rows)
    return 0


def _cmd_nc(args):
    from .combinat import enumerate_nc

    structs = enumerate_nc(args.kind, args.n)
    if args.count_only:
        if args.format == "json":
            _write(args, json.dumps({"count": len(structs)}))
        else:
            _write(args, str(len(structs)))
        return 0
    rows = [["".join("{%s}" % ",".join(str(i + 1) for i in blk)
                     for blk in s.blocks)] for s in structs]
    _emit_rows(args, ["blocks"], rows)
    return 0


def _cmd_free_wick(args):
    import numpy as np

    from .freecalc import wick_joint_moment

    gamma = np.loadtxt(args.gamma, delimiter=",", ndmin=2)
    word = [i - 1 for i in _ints(args.word)]   # 1-based on the CLI
    v = wick_joint_moment(gamma, word)
    _emit_scalar(args, {"value": v, "method": "wick"})
    return 0


def _cmd_free_moments(args):
    from .freecalc import free_moments_from_cumulants

    kappa = _floats(args.cumulants)
    if len(kappa) < args.n:
        kappa = kappa + [0.0] * (args.n - len(kappa))
    ms = free_moments_from_cumulants(kappa, args.n)
    _emit_rows(args, ["k", "moment"], [[k + 1, m] for k, m in enumerate(ms)])
    return 0


def _cmd_moment_exact(args):
    from .covariance import parse_model
    from .moments import exact_joint_moment

    model = parse_model(args.rho)
    res = exact_joint_moment(_ints(args.q), _floats(args.t), args.n, model,
                             budget=args.budget)
    _emit_scalar(args, {"value": res.value, "method": res.method,
                        "meta": res.meta})
    return 0


def _cmd_moment_limit(args):
    from .moments import MC, Quadrature, limit_joint_moment

    if args.method == "mc":
        method = MC(samples=args.samples, seed=args.seed)
    else:
        method = Quadrature(level=args.level)
    res = limit_joint_moment(args.q, args.H, _floats(args.t), method)
    meta = dict(res.meta)
    if res.method == "mc":
        meta.update(_meta_stochastic(res.seed, res.n_samples))
    _emit_scalar(args, {"value": res.value, "stderr": res.stderr,
                        "method": res.method, "seed": res.seed, "meta": meta})
    return 0


def _cmd_clt_variance(args):
    from .covariance import parse_model
    from .moments import clt_variance
    from .poly import decompose

    exp = decompose(_floats(args.coeffs))
    cv = clt_variance(exp, parse_model(args.rho), truncation=args.truncation)
    if args.format == "json":
        _write(args, json.dumps({
            "free": cv.free, "classical": cv.classical,
            "ratio": cv.free / cv.classical if cv.classical else None,
            "per_term": {str(s): d for s, d in cv.per_term.items()},
            "tail_bound": cv.tail_bound, "truncation": cv.truncation}))
        return 0
    _emit_scalar(args, {"free": cv.free, "classical": cv.classical,
                        "ratio": cv.free / cv.classical if cv.classical else None})
    return 0


def _cmd_karamata(args):
    from .covariance import parse_slowly_varying
    from .moments import karamata_ratio

    L = parse_slowly_varying(args.L) if args.L else None
    v = karamata_ratio(args.q, args.D, args.n, L=L, t=args.t)
    _emit_scalar(args, {"value": v, "method": "exact"})
    return 0


def _cmd_converge(args):
    from .covariance import Const, PowerLaw, parse_slowly_varying
    from .moments import MC, exact_joint_moment, limit_joint_moment, nclt_constants

    L = parse_slowly_varying(args.L) if args.L else Const(1.0)
    model = PowerLaw(args.D, L)
    p, q, t = args.p, args.q, args.t
    base = nclt_constants(q, args.D, L=L)
    if p == 2:
        limit = base.limit_coeff ** 2 * t ** (2 * base.H)
    else:
        lm = limit_joint_moment(q, base.H, (t,) * p,
                                MC(samples=args.samples, seed=args.seed))
        limit = base.limit_coeff ** p * lm.value
    rows = []
    for n in [int(v) for v in _floats(args.n_grid)]:
        consts = nclt_constants(q, args.D, L=L, n=n)
        res = exact_joint_moment((q,) * p, (t,) * p, n, model,
                                 budget=args.budget)
        scaled = res.value / consts.normalization ** p
        rows.append([n, scaled, limit, abs(scaled - limit)])
    _emit_rows(args, ["n", "scaled_moment", "limit", "abs_err"],
               rows, meta=_meta_stochastic(args.seed, args.samples)
               if p > 2 else None)
    return 0


def _cmd_kernel_eval(args):
    from .kernels import KernelSpec, kernel_eval

    spec = KernelSpec(args.q, args.H, args.t)
    v = kernel_eval(spec, _floats(args.x), method=args.method, tol=args.tol)
    _emit_scalar(args, {"value": v, "method": args.method})
    return 0


def _cmd_kernel_norm(args):
    from .kernels import KernelSpec, kernel_l2_norm_sq

    spec = KernelSpec(args.q, args.H, args.t)
    v = kernel_l2_norm_sq(spec, args.grid)
    _emit_scalar(args, {"value": v, "method": "grid",
                        "meta": {"grid": args.grid,
                                 "reference": args.t ** (2 * args.H)}})
    return 0


def _cmd_kernel_cumulants(args):
    import numpy as np

    from .errors import DomainError
    from .kernels import discretize_operator, free_cumulants_trace

    parts = _floats(args.grid)
    if len(parts) == 1:
        grid = (-8.0 * args.t, args.t, int(parts[0]))
    elif len(parts) == 3:
        grid = (parts[0], parts[1], int(parts[2]))
    else:
        raise DomainError("--grid takes m or x_min,x_max,m")
    op = discretize_operator(args.H, args.t, grid)
    tc = free_cumulants_trace(op, p_max=args.pmax)
    rows = [[p, tc.traces[p], float(np.sum(tc.eigenvalues ** p))]
            for p in range(1, args.pmax + 1)]
    _emit_rows(args, ["p", "kappa_trace", "kappa_eigen"], rows,
               meta={"truncation_mass": op.truncation_mass, **op.meta})
    return 0


def _cmd_simulate_wigner(args):
    from .sim import estimate_poly_moment, estimate_trace_moments
    from .freecalc import semicircle_moment

    meta = _meta_stochastic(args.seed, args.reps)
    if args.poly:
        row = estimate_poly_moment(args.n, _floats(args.poly), args.reps,
                                   seed=args.seed, t=args.t)
        rows = [[row.quantity, row.value, row.stderr, row.reference]]
    else:
        est = estimate_trace_moments(args.n, args.k_max, args.reps,
                                     seed=args.seed, t=args.t)
        rows = [["moment_%d" % k, m, s, semicircle_moment(k, 0.0, args.t)]
                for k, (m, s) in est.items()]
    _emit_rows(args, ["quantity", "empirical", "stderr", "reference"],
               rows, meta=meta)
    return 0


def _cmd_simulate_freeness(args):
    from .sim import asymptotic_freeness_check

    ts = _floats(args.times)
    cuts = [0.0] + list(ts)
    intervals = tuple(zip(cuts[:-1], cuts[1:]))
    rows = asymptotic_freeness_check(args.n, args.reps, seed=args.seed,
                                     intervals=intervals)
    _emit_rows(args, ["quantity", "empirical", "stderr", "reference"],
               [[r.quantity, r.value, r.stderr, r.reference] for r in rows],
               meta=_meta_stochastic(args.seed, args.reps))
    return 0


def _cmd_simulate_limits(args):
    from .covariance import parse_model
    from .poly import TchebExpansion
    from .sim import simulate_limits

    exp = TchebExpansion(coeffs={args.q: 1.0}, basis="tcheb")
    rows = simulate_limits(args.kind, parse_model(args.rho), exp,
                           args.ntime, args.reps, seed=args.seed,
                           n_matrix=args.matrix_n)
    _emit_rows(args, ["quantity", "empirical", "stderr", "reference"],
               [[r.quantity, r.value, r.stderr, r.reference] for r in rows],
               meta=_meta_stochastic(args.seed, args.reps))
    return 0


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted both before and after the subcommand: the
    # trailing copies use SUPPRESS defaults so they only override when given
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"),
                        default=argparse.SUPPRESS,
                        help="output format (default json)")
    common.add_argument("--output", default=argparse.SUPPRESS,
                        help="write output to a file instead of stdout")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="cap BLAS/OpenMP threads (env WIGNERLAB_THREADS)")

    ap = argparse.ArgumentParser(
        prog="wignerlab",
        description="Joint moments of Tchebycheff functionals of stationary "
                    "semicircular sequences, limit kernels, and simulators.",
        epilog="List values starting with a minus sign need the equals "
               "form, e.g. --coeffs=-1,0,1.")
    ap.add_argument("--format", choices=("json", "csv"), default="json",
                    help="output format (default json)")
    ap.add_argument("--output", help="write output to a file instead of stdout")
    ap.add_argument("--threads", type=int, default=None,
                    help="cap BLAS/OpenMP threads (env WIGNERLAB_THREADS)")
    ap.add_argument("--args-file",
                    help="read additional flags from a file, one per line")
    sub = ap.add_subparsers(dest="command", required=True)

    def leaf(parent, name, **kw):
        return parent.add_parser(name, parents=[common], **kw)

    poly = sub.add_parser("poly", help="orthogonal polynomial utilities")
    ps = poly.add_subparsers(dest="sub", required=True)
    pe = leaf(ps, "eval", help="evaluate U_k or H_k at a point")
    pe.add_argument("--basis", default="tcheb")
    pe.add_argument("--k", type=int, required=True)
    pe.add_argument("--x", type=float, required=True)
    pe.set_defaults(func=_cmd_poly_eval)
    pd = leaf(ps, "decompose", help="monomial to orthogonal basis")
    pd.add_argument("--basis", default="tcheb")
    pd.add_argument("--coeffs", required=True,
                    help="c0,c1,... lowest degree first")
    pd.set_defaults(func=_cmd_poly_decompose)

    co = leaf(sub, "contractions", help="admissible contraction vectors")
    co.add_argument("--q", required=True, help="block profile, e.g. 3,2,4,3")
    co.add_argument("--scalar-only", action="store_true")
    co.set_defaults(func=_cmd_contractions)

    nc = leaf(sub, "nc", help="non-crossing pairings/partitions")
    nc.add_argument("--kind", choices=("pairing", "partition"), required=True)
    nc.add_argument("--n", type=int, required=True)
    nc.add_argument("--count-only", action="store_true")
    nc.set_defaults(func=_cmd_nc)

    fr = sub.add_parser("free", help="free-probability calculator")
    fs = fr.add_subparsers(dest="sub", required=True)
    fw = leaf(fs, "wick", help="joint moment of a semicircular word")
    fw.add_argument("--gamma", required=True, help="CSV covariance matrix path")
    fw.add_argument("--word", required=True, help="1-based indices, e.g. 1,2,1,2")
    fw.set_defaults(func=_cmd_free_wick)
    fm = leaf(fs, "moments", help="moments from free cumulants")
    fm.add_argument("--cumulants", required=True, help="kappa_1,kappa_2,...")
    fm.add_argument("--n", type=int, required=True)
    fm.set_defaults(func=_cmd_free_moments)

    mo = sub.add_parser("moment", help="exact / limit joint moments")
    ms = mo.add_subparsers(dest="sub", required=True)
    me = leaf(ms, "exact", help="exact lattice joint moment")
    me.add_argument("--q", required=True)
    me.add_argument("--t", required=True)
    me.add_argument("--n", type=int, required=True)
    me.add_argument("--rho", required=True,
                    help="delta | geometric:a=A | powerlaw:D=DD[,L=...] | table:PATH")
    me.add_argument("--budget", type=float, default=10 ** 9)
    me.set_defaults(func=_cmd_moment_exact)
    ml = leaf(ms, "limit", help="limit-process joint moment")
    ml.add_argument("--q", type=int, required=True)
    ml.add_argument("--H", type=float, required=True)
    ml.add_argument("--t", required=True)
    ml.add_argument("--method", choices=("mc", "quadrature"), default="mc")
    ml.add_argument("--samples", type=int, default=10 ** 6)
    ml.add_argument("--seed", type=int, default=0)
    ml.add_argument("--level", type=int, default=30)
    ml.set_defaults(func=_cmd_moment_limit)

    cl = sub.add_parser("clt", help="short-range limit variance")
    cs = cl.add_subparsers(dest="sub", required=True)
    cvp = leaf(cs, "variance", help="free vs classical limit variance")
    cvp.add_argument("--coeffs", required=True,
                     help="monomial c0,c1,... lowest degree first")
    cvp.add_argument("--rho", required=True)
    cvp.add_argument("--truncation", type=int, default=10 ** 6)
    cvp.set_defaults(func=_cmd_clt_variance)

    ka = leaf(sub, "karamata", help="regular-variation partial sum ratio")
    ka.add_argument("--q", type=int, required=True)
    ka.add_argument("--D", type=float, required=True)
    ka.add_argument("--n", type=int, required=True)
    ka.add_argument("--L", help="const[:c] | log | loglog")
    ka.add_argument("--t", type=float, default=1.0)
    ka.set_defaults(func=_cmd_karamata)

    cv = leaf(sub, "converge", help="scaled-moment convergence table")
    cv.add_argument("--q", type=int, required=True)
    cv.add_argument("--D", type=float, required=True)
    cv.add_argument("--p", type=int, default=2)
    cv.add_argument("--n-grid", required=True, help="e.g. 1e3,1e4,1e5")
    cv.add_argument("--L", help="const[:c] | log | loglog")
    cv.add_argument("--t", type=float, default=1.0)
    cv.add_argument("--seed", type=int, default=0)
    cv.add_argument("--samples", type=int, default=10 ** 6)
    cv.add_argument("--budget", type=float, default=10 ** 9)
    cv.set_defaults(func=_cmd_converge)

    ke = sub.add_parser("kernel", help="limit-process kernel tools")
    ks = ke.add_subparsers(dest="sub", required=True)
    k1 = leaf(ks, "eval", help="kernel value at a point")
    k1.add_argument("--q", type=int, required=True)
    k1.add_argument("--H", type=float, required=True)
    k1.add_argument("--t", type=float, required=True)
    k1.add_argument("--x", required=True, help="q comma-separated coordinates")
    k1.add_argument("--method", default="auto",
                    choices=("auto", "closed", "quad"))
    k1.add_argument("--tol", type=float, default=1e-9)
    k1.set_defaults(func=_cmd_kernel_eval)
    k2 = leaf(ks, "norm", help="squared L2 norm of the kernel")
    k2.add_argument("--q", type=int, required=True)
    k2.add_argument("--H", type=float, required=True)
    k2.add_argument("--t", type=float, required=True)
    k2.add_argument("--grid", type=int, default=2048)
    k2.set_defaults(func=_cmd_kernel_norm)
    k3 = leaf(ks, "cumulants", help="operator-trace free cumulants, q=2")
    k3.add_argument("--H", type=float, required=True)
    k3.add_argument("--t", type=float, required=True)
    k3.add_argument("--pmax", type=int, default=6)
    k3.add_argument("--grid", default="1024", help="m or x_min,x_max,m")
    k3.set_defaults(func=_cmd_kernel_cumulants)

    si = sub.add_parser("simulate", help="random-matrix simulators")
    ss = si.add_subparsers(dest="sub", required=True)
    sw = leaf(ss, "wigner", help="moments of one matrix-BM marginal")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--reps", type=int, required=True)
    sw.add_argument("--t", type=float, default=1.0)
    sw.add_argument("--poly", help="monomial c0,c1,... lowest degree first")
    sw.add_argument("--k-max", type=int, default=4)
    sw.add_argument("--seed", type=int, default=0)
    sw.set_defaults(func=_cmd_simulate_wigner)
    sf = leaf(ss, "freeness", help="alternating-moment freeness check")
    sf.add_argument("--n", type=int, required=True)
    sf.add_argument("--times", default="1,2", help="t1,t2 increment endpoints")
    sf.add_argument("--reps", type=int, required=True)
    sf.add_argument("--seed", type=int, default=0)
    sf.set_defaults(func=_cmd_simulate_freeness)
    sl = leaf(ss, "limits", help="empirical vs exact limit variances")
    sl.add_argument("--kind", choices=("free", "classical"), required=True)
    sl.add_argument("--q", type=int, required=True)
    sl.add_argument("--rho", required=True)
    sl.add_argument("--ntime", type=int, required=True)
    sl.add_argument("--matrix-n", type=int, default=40)
    sl.add_argument("--reps", type=int, required=True)
    sl.add_argument("--seed", type=int, default=0)
    sl.set_defaults(func=_cmd_simulate_limits)

    return ap


def _expand_args_file(argv):
    if "--args-file" not in argv:
        return argv
    i = argv.index("--args-file")
    if i + 1 >= len(argv):
        return argv
    path = argv[i + 1]
    with open(path) as fh:
        extra = []
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                extra.extend(shlex.split(line))
    return argv[:i] + extra + argv[i + 2:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_args_file(argv)
    except OSError as exc:
        print("error[usage]: %s" % exc, file=sys.stderr)
        return 2
    ap = build_parser()
    args = ap.parse_args(argv)

    threads = args.threads
    if threads is None and os.environ.get("WIGNERLAB_THREADS"):
        threads = int(os.environ["WIGNERLAB_THREADS"])

    from .errors import AccuracyError, DomainError, SizeError

    try:
        if threads is not None:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=threads):
                return args.func(args)
        return args.func(args)
    except DomainError as exc:
        print("error[domain]: %s" % exc, file=sys.stderr)
        return 3
    except SizeError as exc:
        print("error[size]: %s" % exc, file=sys.stderr)
        return 4
    except AccuracyError as exc:
        print("error[accuracy]: %s" % exc, file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
