"""Command-line front end.

    aoipreempt evaluate --config F
    aoipreempt simulate --config F [--slots N] [--warmup W] [--seed S] [--level L]
    aoipreempt optimize --config F --family K [--grid-step G]
    aoipreempt sweep    --config F --param P --from A --to B --step H
                        --families L --out PATH [--grid-step G]

Exit status: 0 on success, 1 for invalid input, 2 for numerical failures.
"""
from __future__ import annotations

import argparse
import sys

from . import config as cfgmod
from .analysis import average_aoi
from .errors import NumericalError, ValidationError
from .optimize import PARAM_NAMES, grid_optimize
from .simulate import confidence_interval, simulate
from .sweep import SweepSpec, format_params, run_sweep, write_sweep_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _fmt(x: float) -> str:
    return f"{x:.9f}"


def cmd_evaluate(args, out):
    cfg = cfgmod.load_config(args.config)
    report = average_aoi(cfgmod.scenario_from_config(cfg))
    print(f"delta_bar = {_fmt(report.delta_bar)}", file=out)
    print("pi = " + " ".join(_fmt(p) for p in report.pi), file=out)
    print("gamma,E[tau],E[tau^2]", file=out)
    for g, (a, b) in enumerate(zip(report.m1, report.m2), start=1):
        print(f"{g},{_fmt(a)},{_fmt(b)}", file=out)


def cmd_simulate(args, out):
    cfg = cfgmod.load_config(args.config)
    scenario = cfgmod.scenario_from_config(cfg)
    sim = cfgmod.sim_settings(cfg)
    for key in ("slots", "warmup", "seed"):
        if getattr(args, key) is not None:
            sim[key] = getattr(args, key)
    stats = simulate(scenario, sim["slots"], sim["warmup"], sim["seed"], sim["batches"])
    lo, hi = confidence_interval(stats, args.level)
    print(f"mean_aoi = {_fmt(stats.mean_aoi)}", file=out)
    print(f"ci{args.level:g} = [{_fmt(lo)}, {_fmt(hi)}]", file=out)
    print(f"slots = {stats.slots}", file=out)
    print(f"warmup = {stats.warmup}", file=out)
    print(f"seed = {sim['seed']}", file=out)
    print(f"batches = {stats.batches} x {stats.batch_size}", file=out)
    print(f"delivered = {stats.delivered}", file=out)
    freq = stats.reset_hist / max(stats.delivered, 1)
    print("reset_freq = " + " ".join(_fmt(f) for f in freq), file=out)


def cmd_optimize(args, out):
    cfg = cfgmod.load_config(args.config)
    model = cfgmod.model_from_config(cfg)
    step = args.grid_step if args.grid_step is not None else cfgmod.grid_step(cfg)
    res = grid_optimize(args.family, model, cfgmod.arrival_probability(cfg), step)
    print(f"family = {res.kind}", file=out)
    print(f"params = {format_params(zip(PARAM_NAMES[res.kind], res.params))}", file=out)
    print(f"delta_bar = {_fmt(res.delta_bar)}", file=out)
    print(f"evaluated = {res.evaluated}", file=out)
    print(f"skipped = {res.skipped}", file=out)


def cmd_sweep(args, out):
    cfg = cfgmod.load_config(args.config)
    families = tuple(f.strip().upper() for f in args.families.split(",") if f.strip())
    spec = SweepSpec(args.param, args.start, args.stop, args.step, families)
    step = args.grid_step if args.grid_step is not None else cfgmod.grid_step(cfg)
    rows = run_sweep(cfg, spec, step)
    try:
        write_sweep_csv(rows, args.out)
    except OSError as exc:
        raise ValidationError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(rows)} rows to {args.out}", file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aoipreempt",
                     description="Average AoI of multi-threshold preemption policies.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="exact average AoI of the configured policy")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", help="Monte Carlo estimate with a batch-means interval")
    p.add_argument("--config", required=True)
    p.add_argument("--slots", type=int)
    p.add_argument("--warmup", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=float, default=0.99)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="exhaustive search over one policy family")
    p.add_argument("--config", required=True)
    p.add_argument("--family", required=True, type=str.upper, choices=sorted(PARAM_NAMES))
    p.add_argument("--grid-step", type=float)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimise families along a parameter and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=("q", "beta", "alpha"))
    p.add_argument("--from", dest="start", required=True, type=float)
    p.add_argument("--to", dest="stop", required=True, type=float)
    p.add_argument("--step", required=True, type=float)
    p.add_argument("--families", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid-step", type=float)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except NumericalError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return 2
    return 0


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
