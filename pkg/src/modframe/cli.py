"""Command-line entry point: ``modframe <subcommand>``, CSV on stdout or ``--out``."""

import argparse
import json
import math
import sys

import numpy as np

from modframe import analysis, experiments, models, recovery, sequences
from modframe import operators as ops
from modframe.experiments import ExperimentConfig

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _str_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _shared(p, n=(256,), m=(64,), s=(4,), model="rd", trials=100, snr=(math.inf,)):
    p.add_argument("--n", type=_int_list, default=n, help="signal length(s), comma separated")
    p.add_argument("--m", type=_int_list, default=m, help="measurement count(s)")
    p.add_argument("--s", type=_int_list, default=s, help="sparsity level(s)")
    p.add_argument("--model", default=model, help=f"model id: {', '.join(models.MODEL_IDS)}")
    p.add_argument("--basis", type=_str_list, default=(), help="sparsity basis / bases")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--snr-db", type=_float_list, default=snr, help="SNR grid in dB ('inf' = noiseless)")
    p.add_argument("--solver", choices=tuple(experiments.SOLVERS), default="sp")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="modframe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("golay", help="emit a Rudin-Shapiro Golay pair")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--emit", choices=("a", "b", "both"), default="both")
    p.add_argument("--out", default=None)

    p = sub.add_parser("coherence", help="mu(F Lambda T*) against its Golay bound")
    p.add_argument("--lambda", dest="lam", choices=("golay", "none"), default="golay")
    p.add_argument("--d", type=_int_list, default=tuple(range(3, 11)))
    p.add_argument("--basis", type=_str_list, default=experiments.LEMMA_BASES)
    p.add_argument("--max-n", type=int, default=4096)
    p.add_argument("--out", default=None)

    p = sub.add_parser("ric", help="restricted isometry constant of a model")
    _shared(p, n=(64,), m=(16,), s=(2,))
    p.add_argument("--method", choices=("exact", "sampled"), default="exact")
    p.add_argument("--num-supports", type=int, default=10000)

    p = sub.add_parser("recover", help="one recovery trial")
    _shared(p, n=(64,), m=(32,), s=(3,))

    p = sub.add_parser("phase-transition", help="success rate over an (m, s) grid")
    _shared(p, m=(16, 32, 64, 128), s=(2, 4, 8))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("basis-compat", help="sparsity basis vs sensing scheme study")
    _shared(p, trials=200)
    p.add_argument("--omega", choices=("stride", "contiguous"), default="stride")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ofdm", help="OFDM sparse channel estimation sweep")
    _shared(p, n=(1024,), m=(64,), s=(6,), model="ofdm", snr=(0.0, 10.0, 20.0, 30.0))
    p.add_argument("--schemes", type=_str_list, default=("golay",),
                   help=f"comma list from {', '.join(experiments.OFDM_SCHEMES)}")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _single(args, name):
    values = getattr(args, name)
    if len(values) != 1:
        raise ConfigError(f"--{name} takes a single value for this subcommand, got {values}")
    return values[0]


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _header(meta):
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def cmd_golay(args):
    if args.d < 0:
        raise ConfigError(f"--d must be >= 0, got {args.d}")
    pair = sequences.rudin_shapiro_pair(args.d)
    cols = {"a": pair.a.values.real, "b": pair.b.values.real}
    names = ("a", "b") if args.emit == "both" else (args.emit,)
    rows = [{"k": k, **{c: int(cols[c][k]) for c in names}} for k in range(pair.n)]
    meta = {"command": "golay", "d": args.d, "emit": args.emit}
    return _header(meta) + experiments.to_csv(rows)


def cmd_coherence(args):
    rows = []
    for d in args.d:
        if d < 0:
            raise ConfigError(f"--d values must be >= 0, got {d}")
        lam = models.golay_lambda(d) if args.lam == "golay" else sequences.ones(2**d)
        for psi in args.basis:
            rep = analysis.modulated_coherence(lam, psi, max_n=args.max_n)
            rows.append({
                "d": d, "n": rep.n, "basis": psi, "mu": rep.mu,
                "bound": rep.bound, "pass": rep.passes,
            })
    meta = {"command": "coherence", "lambda": args.lam, "d": list(args.d), "basis": list(args.basis)}
    return _header(meta) + experiments.to_csv(rows)


def _model_kwargs(args):
    kw = {}
    if args.basis:
        kw["psi"] = _single(args, "basis")
    return kw


def cmd_ric(args):
    n, m, s = _single(args, "n"), _single(args, "m"), _single(args, "s")
    A = experiments.default_factory(args.model, n, m, args.seed, **_model_kwargs(args))
    if args.method == "exact":
        rep = analysis.exact_ric(ops.materialize(A), s)
    else:
        rep = analysis.empirical_ric(A, s, args.num_supports, args.seed)
    row = {
        "model": args.model, "n": n, "m": m, "s": s, "seed": args.seed, "method": rep.method,
        "delta_s": rep.delta_s, "supports_evaluated": rep.supports_evaluated,
        "worst_support": " ".join(map(str, rep.worst_support)),
    }
    meta = {"command": "ric", "model": args.model, "n": n, "m": m, "s": s,
            "seed": args.seed, "method": args.method}
    return _header(meta) + experiments.to_csv([row])


def cmd_recover(args):
    n, m, s = _single(args, "n"), _single(args, "m"), _single(args, "s")
    snr = _single(args, "snr_db")
    A = experiments.default_factory(args.model, n, m, args.seed, **_model_kwargs(args))
    x, support = experiments.sparse_signal(n, s, args.seed)
    y = experiments.add_awgn(A.apply(x), snr, args.seed)
    res = experiments.SOLVERS[args.solver](A, y, s)
    row = {
        "model": args.model, "n": n, "m": m, "s": s, "snr_db": snr, "seed": args.seed,
        "solver": args.solver, "support_recovered": res.support.indices == support,
        "nmse_db": recovery.nmse(x, res.xhat), "residual_norm": res.residual_norm,
        "iterations": res.iterations, "converged": res.converged,
    }
    meta = {"command": "recover", "model": args.model, "n": n, "m": m, "s": s,
            "snr_db": experiments._json_float(snr), "seed": args.seed, "solver": args.solver}
    return _header(meta) + experiments.to_csv([row])


def _experiment(kind, args, **extra):
    cfg = ExperimentConfig(
        kind=kind, model=args.model, n=args.n, m=args.m, s=args.s, snr_db=args.snr_db,
        trials=args.trials, base_seed=args.seed, solver=args.solver, out=args.out,
        bases=args.basis, workers=args.workers, **extra,
    )
    return experiments.to_csv(experiments.run(cfg), cfg)


COMMANDS = {
    "golay": cmd_golay,
    "coherence": cmd_coherence,
    "ric": cmd_ric,
    "recover": cmd_recover,
    "phase-transition": lambda a: _experiment("phase-transition", a),
    "basis-compat": lambda a: _experiment("basis-compat", a, omega=a.omega),
    "ofdm": lambda a: _experiment("ofdm", a, schemes=a.schemes),
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        text = COMMANDS[args.command](args)
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"modframe: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"modframe: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
