"""``vpmcf`` command line: run, verify, fit, rescale."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmptyWindow, InsufficientBlowupData
from .flow import FlowConfig, make_state
from .harness.output import read_columns, read_snapshot_csv, write_snapshot_csv
from .singularity import auto_center_alpha, fit_blowup_rate, fit_templates, rescale


def _err(msg):
    print(f"vpmcf: {msg}", file=sys.stderr)


def cmd_run(args) -> int:
    from .harness.config import load_config
    from .harness.runner import execute

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _err(f"{args.config}: {exc}")
        return 1
    except OSError as exc:
        _err(str(exc))
        return 1
    try:
        result = execute(cfg)
    except ValueError as exc:
        # bad preset data (e.g. from_file grid mismatch) is a config problem
        _err(f"{args.config}: {exc}")
        return 1
    traj = result.traj
    print(f"status = {traj.status.value}")
    print(f"t = {traj.final.t!r}")
    print(f"steps = {traj.steps}")
    print(f"records = {len(traj)}")
    for m in result.monitors:
        print(m.line())
    if result.fit is not None:
        print(f"classification = {result.fit.classification}")
    elif result.fit_error:
        print(f"fit unavailable: {result.fit_error}")
    print(f"output = {result.out_dir}")
    return 2 if args.strict and result.monitor_failed else 0


def cmd_verify(args) -> int:
    from .harness.acceptance import run_suite

    results = run_suite(args.suite)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else 1


def cmd_fit(args) -> int:
    try:
        data = read_columns(args.file)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return 1
    missing = [c for c in ("t", "max_A2") if c not in data]
    if missing:
        _err(f"{args.file}: missing column(s) {', '.join(missing)}")
        return 1
    try:
        fit = fit_blowup_rate(np.array(data["t"], dtype=float),
                              np.array(data["max_A2"], dtype=float), args.min_growth)
    except InsufficientBlowupData as exc:
        _err(str(exc))
        return 1
    sys.stdout.write(fit.report())
    return 0


def _real_or_auto(text):
    return None if text == "auto" else float(text)


def cmd_rescale(args) -> int:
    try:
        profile = read_snapshot_csv(args.snapshot, n=args.n)
        state = make_state(profile, FlowConfig(), 0.0)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return 1
    center, alpha = auto_center_alpha(state, args.alpha_rule)
    if args.center is not None:
        center = args.center
    if args.alpha is not None:
        alpha = args.alpha
    try:
        out = rescale(state, center, alpha, args.half_width)
    except (EmptyWindow, ValueError) as exc:
        _err(str(exc))
        return 1
    tf = fit_templates(out)
    print(f"center = {center!r}")
    print(f"alpha = {alpha!r}")
    print(f"window = {out.grid.a!r} {out.grid.b!r}")
    print(f"cyl_r = {tf.cyl_r!r}")
    print(f"cyl_resid = {tf.cyl_resid!r}")
    print(f"cat_c5 = {tf.cat_c5!r}")
    print(f"cat_resid = {tf.cat_resid!r}")
    if args.out:
        write_snapshot_csv(Path(args.out), make_state(out, FlowConfig(), 0.0))
        print(f"output = {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpmcf",
        description="Axially symmetric volume preserving mean curvature flow between two planes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured simulation")
    p.add_argument("--config", required=True, help="key = value configuration file")
    p.add_argument("--strict", action="store_true", help="exit 2 if any monitor fails")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", default="all",
                   choices=["identities", "oracles", "sturm", "blowup", "all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="type-I rate fit of a timeseries CSV")
    p.add_argument("file", help="CSV with columns t and max_A2")
    p.add_argument("--min-growth", type=float, default=10.0,
                   help="use samples with max_A2 above this multiple of the first")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rescale", help="parabolically rescale a snapshot about its neck")
    p.add_argument("snapshot", help="snapshot CSV with columns x and rho")
    p.add_argument("--alpha", type=_real_or_auto, default=None, help="'auto' or a number")
    p.add_argument("--center", type=_real_or_auto, default=None, help="'auto' or a number")
    p.add_argument("--alpha-rule", choices=["neck", "curvature"], default="neck",
                   help="auto alpha: 1/min(rho) or max|A|")
    p.add_argument("--n", type=int, default=2, help="surface dimension")
    p.add_argument("--half-width", type=float, default=None,
                   help="keep |x~| <= this in rescaled units")
    p.add_argument("--out", default=None, help="write the rescaled profile here")
    p.set_defaults(func=cmd_rescale)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
