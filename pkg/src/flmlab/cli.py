"""Command line entry point.

Exit codes: 0 when every check passes, 1 when a criterion fails and 2 for
usage, configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import config as _config
from . import harness
from .bodies import make_standard
from .errors import FlmError
from .rng import derive_seed
from .sphere import mc_M, mc_mean_width

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _write(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_list(args) -> int:
    for name in sorted(harness.REGISTRY):
        exp = harness.REGISTRY[name]
        crit = "-" if exp.criterion is None else str(exp.criterion)
        print(f"{name:<16} module={exp.module:<13} criterion={crit:<2} {exp.help}")
        for p in exp.params:
            extra = f"  {p.help}" if p.help else ""
            print(f"    --{p.name} (default {p.default}){extra}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    info = harness.body_summary(args.body, method=args.method)
    for key, value in info.items():
        print(f"{key}: {value}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    K = make_standard(args.body)
    cfg = _config.current()
    samples = args.samples or cfg.mc_samples
    rows = []
    if args.quantity in ("m", "mmstar"):
        m = mc_M(K.gauge, K.dim, samples, derive_seed(args.seed, "M"))
        rows.append(("m", m.mean, m.stderr))
    if args.quantity in ("mstar", "mmstar"):
        ms = mc_mean_width(K.support, K.dim, samples, derive_seed(args.seed, "Mstar"))
        rows.append(("mstar", ms.mean, ms.stderr))
    if args.quantity == "mmstar":
        (_, a, ea), (_, b, eb) = rows
        rows = [("mmstar", a * b, (a * a * eb * eb + b * b * ea * ea) ** 0.5)]
    out = [(args.body, q, mean, err, samples, args.seed) for q, mean, err in rows]
    _write(harness.csv_text(("body", "quantity", "mean", "stderr", "samples", "seed"), out), args.out)
    return EXIT_OK


def cmd_hanner(args) -> int:
    spec = harness.ExperimentSpec("hanner-family", {"a": args.a, "max-exp": args.max_exp}, out=args.out)
    return _finish(spec)


def _finish(spec: harness.ExperimentSpec) -> int:
    outcome = harness.run(spec)
    if spec.out is None:
        sys.stdout.write(harness.csv_text(outcome.result.columns, outcome.result.rows))
    for flag, ok in sorted(outcome.result.flags.items()):
        print(f"{spec.name}: {flag} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if outcome.passed else EXIT_FAIL


def cmd_experiment(args) -> int:
    exp = harness.get(args.name)
    params = {}
    for p in exp.params:
        value = getattr(args, "p_" + p.name.replace("-", "_"))
        if value is not None:
            params[p.name] = value
    return _finish(harness.ExperimentSpec(exp.name, params, args.seed, args.out))


def cmd_run(args) -> int:
    if args.name == "suite":
        out_dir = args.out_dir or "results"
        outcomes = harness.run_suite(out_dir, args.seed)
        table = harness.report([out_dir])
        print(table.text())
        return EXIT_OK if all(o.passed for o in outcomes) else EXIT_FAIL
    params = {}
    for item in args.params:
        if "=" not in item:
            raise FlmError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()
    harness.get(args.name)
    out = args.out or (str(Path(args.out_dir) / f"{args.name}.csv") if args.out_dir else None)
    return _finish(harness.ExperimentSpec(args.name, params, args.seed, out))


def cmd_report(args) -> int:
    table = harness.report(args.paths)
    if table.rows:
        print(table.text())
    return EXIT_OK if table.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flmlab", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="key=value config file (default: $FLMLAB_CONFIG)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    sub.add_parser("list", help="registered experiments").set_defaults(func=cmd_list)

    p = sub.add_parser("enumerate", help="vertex and facet counts of a standard body")
    p.add_argument("--body", required=True)
    p.add_argument("--method", choices=("auto", "brute", "qhull"), default="auto")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("estimate", help="Monte Carlo M, M* or M M*")
    p.add_argument("--body", required=True)
    p.add_argument("--quantity", choices=("m", "mstar", "mmstar"), required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("hanner", help="exact counts of the dyadic Hanner family")
    p.add_argument("--a", required=True)
    p.add_argument("--max-exp", type=int, default=40)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hanner)

    p = sub.add_parser("experiment", help="run one registered experiment")
    exps = p.add_subparsers(dest="name", required=True)
    for name in sorted(harness.REGISTRY):
        exp = harness.REGISTRY[name]
        q = exps.add_parser(name, help=exp.help)
        for prm in exp.params:
            q.add_argument(f"--{prm.name}", dest="p_" + prm.name.replace("-", "_"), help=prm.help or None)
        q.add_argument("--seed", type=int)
        q.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("run", help="run an experiment from key=value pairs, or 'suite'")
    p.add_argument("name")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="merge run summaries into a pass/fail table")
    p.add_argument("paths", nargs="*")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    previous = _config.current() if _config._current is not None else None
    try:
        cfg = _config.load(args.config)
        if args.set:
            pairs = dict(item.split("=", 1) for item in args.set if "=" in item)
            if len(pairs) != len(args.set):
                raise FlmError("--set expects KEY=VALUE")
            cfg = _config.override(pairs, cfg)
        _config.set_current(cfg)
        return args.func(args)
    except (FlmError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"flmlab: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        _config.set_current(previous)
