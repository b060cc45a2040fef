"""Command-line front end.

Subcommands: ``test`` (one-sample mean tests on a CSV), ``bootstrap``
(resampling pipeline), ``simulate-power`` (Monte-Carlo power harness),
``spectrum`` (shrunk eigenvalue table for a dataset), ``mp`` (closed-form
transform grid), and ``fixtures`` (synthetic dataset generator).

Exit status: 0 on success, 1 on a computation error (with a diagnostic on
stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bootstrap as bt
from . import meantests as mt
from . import power as pw
from .linalg import sample_moments, spectral_decompose
from .shrinkage import lw_shrink, stein_isotonized
from .spectrum import KernelConfig, mp_density, mp_edges, mp_stieltjes

_TEST_METHODS = ("hotelling", "decomposite", "stein", "bs", "diag", "ridge", "composite")


def _read_mu0(path):
    if path is None:
        return None
    return bt.read_csv(path).ravel()


def _emit(args, payload: dict, csv_rows: tuple[list[str], list[list]] | None = None):
    if args.out == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        header, rows = csv_rows
        print(",".join(header))
        for row in rows:
            print(",".join(str(v) for v in row))


def _config_echo(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _cmd_test(args) -> int:
    X = bt.read_csv(args.input, has_header=args.header)
    mu0 = _read_mu0(args.mu0)
    cfg = KernelConfig(h=args.bandwidth)
    if args.method == "hotelling":
        out = mt.hotelling_t2(X, mu0=mu0)
    elif args.method == "decomposite":
        out = mt.normalized_decomposite(X, cfg, mu0=mu0)
    elif args.method == "stein":
        out = mt.decomposite_t2(X, "stein", cfg, mu0=mu0)
    elif args.method == "composite":
        out = mt.composite_t2(X, args.k, scheme=args.scheme, mu0=mu0)
    else:
        out = mt.variant_statistic(X, args.method, ridge=args.ridge, mu0=mu0)
    reject = out.p_value is not None and out.p_value <= args.alpha
    payload = {
        "method": out.method,
        "statistic": out.statistic,
        "normalized": out.normalized,
        "p_value": out.p_value,
        "reject_at_alpha": bool(reject) if out.p_value is not None else None,
        "config": _config_echo(args, ("input", "method", "alpha", "ridge", "k", "scheme")),
        "warnings": [],
    }
    _emit(args, payload, (
        ["method", "statistic", "normalized", "p_value"],
        [[out.method, out.statistic, out.normalized, out.p_value]],
    ))
    return 0


def _cmd_bootstrap(args) -> int:
    X = bt.read_csv(args.input, has_header=args.header)
    config = bt.BootstrapConfig(
        reps=args.reps, fraction=args.frac, seed=args.seed, tail=args.tail,
        method=args.method, mu0=_read_mu0(args.mu0), center=not args.no_center,
        add_one=args.add_one, ridge=args.ridge, k=args.k,
        block_scheme=args.scheme, cfg=KernelConfig(h=args.bandwidth),
    )
    res = bt.run_bootstrap(X, config)
    payload = res.to_dict()
    payload["config"] = _config_echo(
        args, ("input", "method", "reps", "frac", "tail", "seed", "k", "scheme"))
    _emit(args, payload, (
        ["method", "statistic", "p_value", "tail", "reps"],
        [[res.method, res.observed, res.p_value, res.tail, res.samples.size]],
    ))
    return 0


def _cmd_simulate_power(args) -> int:
    delta = None
    if not args.null:
        delta = pw.draw_delta(args.p, args.delta_seed, norm=args.delta_norm)
    config = pw.PowerConfig(
        p=args.p, n=args.n, rho=args.rho, alpha=args.alpha, reps=args.reps,
        k=args.k, seed=args.seed, methods=tuple(args.methods), delta=delta,
        block_scheme=args.scheme, ridge=args.ridge,
        cfg=KernelConfig(h=args.bandwidth),
    )
    rows = [est.to_dict() for est in pw.mc_power(config)]
    payload = {
        "results": rows,
        "config": _config_echo(
            args, ("p", "n", "rho", "alpha", "reps", "k", "seed", "methods",
                   "scheme", "delta_seed", "delta_norm")),
        "warnings": [],
    }
    header = ["method", "rho", "p", "n", "rejection_rate", "std_err", "are_vs_composite"]
    _emit(args, payload, (header, [[r[h] for h in header] for r in rows]))
    return 0


def _cmd_spectrum(args) -> int:
    X = bt.read_csv(args.input, has_header=args.header)
    n = X.shape[0]
    _, S = sample_moments(X)
    lam = spectral_decompose(S).eigenvalues
    cfg = KernelConfig(h=args.bandwidth)
    stein = stein_isotonized(lam, n).values
    lw = lw_shrink(lam, n, cfg).values
    header = ["eigenvalue", "stein", "lw"]
    rows = [[lam[i], stein[i], lw[i]] for i in range(lam.size)]
    payload = {"eigenvalues": lam.tolist(), "stein": stein.tolist(), "lw": lw.tolist(),
               "config": _config_echo(args, ("input",)), "warnings": []}
    _emit(args, payload, (header, rows))
    return 0


def _cmd_mp(args) -> int:
    model = mp_edges(args.c)
    span = model.upper - model.lower
    xs = np.linspace(model.lower + args.margin * span,
                     model.upper - args.margin * span, args.points)
    rows = []
    for x in xs:
        m = mp_stieltjes(float(x), model)
        rows.append([float(x), m.real, m.imag, float(mp_density(x, model))])
    payload = {
        "c": args.c, "lower_edge": model.lower, "upper_edge": model.upper,
        "grid": [{"x": r[0], "re": r[1], "im": r[2], "density": r[3]} for r in rows],
        "config": _config_echo(args, ("c", "points", "margin")), "warnings": [],
    }
    _emit(args, payload, (["x", "re", "im", "density"], rows))
    return 0


def _cmd_fixtures(args) -> int:
    data = bt.make_metro_fixture(args.days, args.stations, args.seed)
    header = [f"station_{j + 1:03d}" for j in range(args.stations)]
    bt.write_csv(args.path, data, header=header)
    print(json.dumps({"path": args.path, "days": args.days, "stations": args.stations,
                      "seed": args.seed}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdmean",
        description="High-dimensional one-sample mean tests and shrinkage spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="CSV file, rows = observations")
            p.add_argument("--header", action="store_true", help="skip a header row")
        p.add_argument("--out", choices=("json", "csv"), default="json")

    t = sub.add_parser("test", help="run a one-sample mean test")
    common_io(t)
    t.add_argument("--method", choices=_TEST_METHODS, default="decomposite")
    t.add_argument("--ridge", type=float, default=None)
    t.add_argument("--k", type=int, default=2, help="number of composite blocks")
    t.add_argument("--scheme", choices=("contiguous", "interleaved"), default="contiguous")
    t.add_argument("--mu0", default=None, help="CSV with the reference mean vector")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--bandwidth", type=float, default=None)
    t.set_defaults(func=_cmd_test)

    b = sub.add_parser("bootstrap", help="bootstrap testing pipeline")
    common_io(b)
    b.add_argument("--reps", type=int, default=1000)
    b.add_argument("--frac", type=float, default=0.95)
    b.add_argument("--tail", choices=bt.TAILS, default="upper")
    b.add_argument("--method", choices=_TEST_METHODS, default="decomposite")
    b.add_argument("--ridge", type=float, default=None)
    b.add_argument("--k", type=int, default=2)
    b.add_argument("--scheme", choices=("contiguous", "interleaved"), default="interleaved")
    b.add_argument("--mu0", default=None)
    b.add_argument("--no-center", action="store_true",
                   help="skip null centering (literal resampling of the raw rows)")
    b.add_argument("--add-one", action="store_true",
                   help="use the (count+1)/(B+1) p-value correction")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--nondeterministic", action="store_true")
    b.add_argument("--bandwidth", type=float, default=None)
    b.set_defaults(func=_cmd_bootstrap, needs_seed=True)

    s = sub.add_parser("simulate-power", help="Monte-Carlo power comparison")
    common_io(s, needs_input=False)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--reps", type=int, default=400)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--methods", nargs="+", default=["decomposite", "composite"])
    s.add_argument("--scheme", choices=("contiguous", "interleaved"), default="interleaved")
    s.add_argument("--ridge", type=float, default=None)
    s.add_argument("--null", action="store_true", help="size run: mu = 0")
    s.add_argument("--delta-seed", type=int, default=20240501)
    s.add_argument("--delta-norm", type=float, default=1.5)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--nondeterministic", action="store_true")
    s.add_argument("--bandwidth", type=float, default=None)
    s.set_defaults(func=_cmd_simulate_power, needs_seed=True)

    sp = sub.add_parser("spectrum", help="shrunk eigenvalue table for a dataset")
    common_io(sp)
    sp.add_argument("--bandwidth", type=float, default=None)
    sp.set_defaults(func=_cmd_spectrum)

    m = sub.add_parser("mp", help="closed-form transform grid on the bulk")
    m.add_argument("--c", type=float, required=True, help="concentration in (0, 1)")
    m.add_argument("--points", type=int, default=50)
    m.add_argument("--margin", type=float, default=0.01,
                   help="fraction of the support clipped at each edge")
    m.add_argument("--out", choices=("json", "csv"), default="csv")
    m.set_defaults(func=_cmd_mp)

    f = sub.add_parser("fixtures", help="synthetic dataset generator")
    fsub = f.add_subparsers(dest="fixture_command", required=True)
    g = fsub.add_parser("gen", help="write a metro-like ridership CSV")
    g.add_argument("--days", type=int, default=120)
    g.add_argument("--stations", type=int, default=30)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--path", required=True)
    g.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "needs_seed", False):
        if args.seed is None and not args.nondeterministic:
            print("error: --seed is required (or pass --nondeterministic)", file=sys.stderr)
            return 2
        if args.seed is None:
            args.seed = int(np.random.SeedSequence().entropy % (2**31))
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
