"""Command-line entry point.

Subcommands: ``sample``, ``estimate``, ``variance-study``, ``slope``.
Exit status is 0 on success, 2 on invalid flags, 1 on runtime failure;
failures print one line starting with ``error:`` to stderr.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import report, samplers
from .estimators import estimate
from .exprparse import ExprSyntaxError
from .orthopoly import is_perfect_square
from .study import (
    ConfigError,
    DegenerateFitError,
    ExperimentConfig,
    Record,
    derive_seed,
    fit_loglog_slope,
    resolve_integrand,
    run_variance_study,
)

DEFAULT_N_LIST = "16,36,64,144,256"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="spheredpp", description="DPP Monte Carlo quadrature on the sphere.", formatter_class=fmt)
    p.subcommands = {}
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="draw one weighted node set", formatter_class=fmt)
    s.add_argument("--method", choices=samplers.METHODS, default="spherical", help="node-set generator")
    s.add_argument("--n", type=int, required=True, help="number of nodes")
    s.add_argument("--seed", type=_seed, default=0, help="master seed")
    s.add_argument("--spiral-c", type=float, default=samplers.DEFAULT_SPIRAL_C, help="spiral constant C")
    s.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")

    e = sub.add_parser("estimate", help="repeated quadrature estimates as raw CSV", formatter_class=fmt)
    e.add_argument("--method", choices=samplers.METHODS, default="spherical", help="node-set generator")
    e.add_argument("--n", type=int, required=True, help="number of nodes")
    e.add_argument("--seed", type=_seed, default=0, help="master seed")
    e.add_argument("--integrand", default="f1", help="builtin name or expr:<expression>")
    e.add_argument("--reps", type=int, default=200, help="number of repetitions")
    e.add_argument("--spiral-c", type=float, default=samplers.DEFAULT_SPIRAL_C, help="spiral constant C")

    v = sub.add_parser("variance-study", help="variance against N for several methods", formatter_class=fmt)
    v.add_argument("--methods", type=_str_list, default=",".join(samplers.METHODS), help="comma-separated methods")
    v.add_argument("--n-list", type=_int_list, default=DEFAULT_N_LIST, help="ascending comma-separated N values")
    v.add_argument("--reps", type=int, default=200, help="repetitions per (method, N)")
    v.add_argument("--integrand", default="f1", help="builtin name or expr:<expression>")
    v.add_argument("--seed", type=_seed, default=0, help="master seed")
    v.add_argument("--spiral-c", type=float, default=samplers.DEFAULT_SPIRAL_C, help="spiral constant C")
    v.add_argument("--workers", type=int, default=1, help="worker processes")
    v.add_argument("--out-dir", default="study_out", help="directory for raw/summary/slopes CSV and plot")

    sl = sub.add_parser("slope", help="fit log-log slopes to a summary CSV", formatter_class=fmt)
    sl.add_argument("--summary", required=True, help="summary.csv from variance-study")
    sl.add_argument("--out", default=None, help="optional slopes CSV path")
    p.subcommands.update({"sample": s, "estimate": e, "variance-study": v, "slope": sl})
    for sp in p.subcommands.values():
        sp.add_argument("--config", default=None, help="key=value file of flag defaults (explicit flags win)")
    return p


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    entries = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, val = (t.strip() for t in line.split("=", 1))
                entries[key.lstrip("-").replace("-", "_")] = val
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    return entries


def _prescan(argv):
    command = next((a for a in argv if not a.startswith("-")), None)
    config = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
        elif a.startswith("--config="):
            config = a.split("=", 1)[1]
    return command, config


def parse_args(argv):
    parser = build_parser()
    command, config = _prescan(argv)
    if config and command in parser.subcommands:
        sub = parser.subcommands[command]
        known = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
        for key, raw in read_config(config).items():
            if key not in known:
                raise UsageError(f"config key {key!r} is not a flag of {command}")
            action = known[key]
            try:
                val = action.type(raw) if action.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config {key}: {exc}") from None
            if action.choices and val not in action.choices:
                raise UsageError(f"config {key}: invalid choice {val!r}")
            sub.set_defaults(**{key: val})
            # a required flag may be satisfied by the config file
            action.required = False
    return parser.parse_args(argv)


def _check_n(method, n):
    if n < 1:
        raise UsageError("--n must be at least 1")
    if method == "jacobi" and not is_perfect_square(n):
        raise UsageError(f"--n {n} is not a perfect square (required for jacobi)")


def _integrand(spec):
    try:
        return resolve_integrand(spec)
    except ExprSyntaxError as exc:
        raise UsageError(f"bad integrand expression: {exc}") from None
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def cmd_sample(args):
    _check_n(args.method, args.n)
    if not args.spiral_c > 0:
        raise UsageError("--spiral-c must be positive")
    seed = derive_seed(args.seed, args.method, args.n, 0)
    sample = samplers.draw(args.method, args.n, np.random.default_rng(seed), spiral_c=args.spiral_c, seed=seed)
    rows = np.column_stack([sample.points, sample.weights])
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "y", "z", "weight"])
        for row in rows:
            w.writerow([report.fmt(v) for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_estimate(args):
    _check_n(args.method, args.n)
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    f = _integrand(args.integrand)
    records = []
    for rep in range(args.reps):
        seed = derive_seed(args.seed, args.method, args.n, rep)
        rng = np.random.default_rng(seed)
        sample = samplers.draw(args.method, args.n, rng, spiral_c=args.spiral_c, seed=seed)
        est = estimate(sample, f)
        records.append(Record(args.method, f.name, args.n, rep, seed, est.value))
    report.write_rows_to(sys.stdout, records)
    return 0


def cmd_variance_study(args):
    _integrand(args.integrand)
    try:
        cfg = ExperimentConfig(
            methods=args.methods,
            n_list=args.n_list,
            reps=args.reps,
            integrand=args.integrand,
            seed=args.seed,
            spiral_c=args.spiral_c,
            workers=args.workers,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    result = run_variance_study(cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    report.write_csv(result.records, os.path.join(args.out_dir, "raw.csv"), kind="raw")
    report.write_csv(result.summary, os.path.join(args.out_dir, "summary.csv"), kind="summary")
    report.write_csv(result.slopes, os.path.join(args.out_dir, "slopes.csv"), kind="slopes")
    report.emit_plot(result.summary, result.slopes, os.path.join(args.out_dir, "plot.svg"), title=cfg.integrand)
    _print_slopes(result.slopes)
    return 0


def _print_slopes(slopes):
    print(f"{'method':<10} {'slope':>9} {'intercept':>10} {'r^2':>7}")
    for s in slopes:
        print(f"{s.method:<10} {s.slope:>9.4f} {s.intercept:>10.4f} {s.r_squared:>7.4f}")


def cmd_slope(args):
    try:
        summary = report.read_csv(args.summary)
    except OSError as exc:
        raise RuntimeError(f"cannot read {args.summary}: {exc.strerror}") from None
    methods = list(dict.fromkeys(r.method for r in summary))
    slopes = []
    for m in methods:
        try:
            slopes.append(fit_loglog_slope(summary, m))
        except DegenerateFitError as exc:
            raise RuntimeError(str(exc)) from None
    _print_slopes(slopes)
    if args.out:
        report.write_csv(slopes, args.out, kind="slopes")
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "variance-study": cmd_variance_study,
    "slope": cmd_slope,
}


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
