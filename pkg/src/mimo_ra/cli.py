"""Command line front end: run, sweep, preset and bound subcommands."""

import argparse
import sys
import time

from .config import PRESET_NAMES, format_config, get_preset, load_config
from .results import RunRecord, make_out_dir, write_results
from .simulator import SweepAxis, derive_seed, run_sharded, sweep

__all__ = ["build_parser", "main"]


def _common_flags(sub):
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--set", dest="sets", action="append", default=[],
                     metavar="KEY=VALUE", help="override one config key (repeatable)")
    sub.add_argument("--out", default="results", help="root output directory")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1,
                     help="parallel shards per simulation point")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-ra",
        description="Random access simulator: SUCRe, ACBPC and baseline.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="one simulation from config/overrides")
    _common_flags(p_run)

    p_sweep = subs.add_parser("sweep", help="one simulation per axis point")
    _common_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=("k0", "st", "distance"))
    p_sweep.add_argument("--values", help="comma-separated axis values")

    p_preset = subs.add_parser("preset", help="run a named figure experiment")
    _common_flags(p_preset)
    p_preset.add_argument("name", choices=PRESET_NAMES)

    p_bound = subs.add_parser("bound", help="analytic resolution bound table")
    _common_flags(p_bound)
    p_bound.add_argument("--n-max", type=int, default=50)

    return parser


def _series_label(params, point_label: str) -> str:
    intf = "intf" if params.interference else "no-intf"
    return f"{params.protocol}:{intf}:{point_label}"


def _cmd_run(args):
    params = load_config(args.config, args.sets)
    table = run_sharded(params, seed=args.seed, shards=args.workers, workers=args.workers)
    if params.mode == "conditioned":
        records = [RunRecord("st", _series_label(params, "run"), params, table)]
    else:
        records = [
            RunRecord("k0", _series_label(params, "run"), params, table),
            RunRecord("distance", _series_label(params, "run"), params, table),
        ]
    return records, None, format_config(params)


def _cmd_sweep(args):
    base = load_config(args.config, args.sets)
    if args.axis == "distance":
        values = ()
    else:
        if not args.values:
            raise ValueError(f"--values is required for axis {args.axis!r}")
        values = tuple(int(v) for v in args.values.split(","))
    axis = SweepAxis(args.axis, values)
    records = [
        RunRecord(axis.kind, _series_label(p, label), p, table)
        for label, p, table in sweep(base, axis, seed=args.seed, workers=args.workers)
    ]
    return records, None, None


def _cmd_preset(args):
    preset = get_preset(args.name)
    records = []
    for i, series in enumerate(preset.series):
        series = load_config(args.config, args.sets, base=series)
        out = sweep(series, preset.axis, seed=derive_seed(args.seed, i), workers=args.workers)
        records.extend(
            RunRecord(preset.axis.kind, _series_label(p, label), p, table)
            for label, p, table in out
        )
    bound_rows = range(1, 51) if preset.bound_table else None
    return records, bound_rows, None


def _cmd_bound(args):
    if args.n_max < 1:
        raise ValueError("--n-max must be at least 1")
    return [], range(1, args.n_max + 1), None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep, "preset": _cmd_preset, "bound": _cmd_bound}
    t0 = time.perf_counter()
    try:
        records, bound_rows, echo = handlers[args.command](args)
        command = args.command if args.command != "preset" else f"preset-{args.name}"
        out_dir = make_out_dir(args.out, command)
        files = write_results(
            records, out_dir, seed=args.seed, command=command,
            bound_rows=bound_rows, wall_time_s=round(time.perf_counter() - t0, 3),
        )
        if echo is not None:
            path = out_dir / "config.txt"
            path.write_text(echo, encoding="utf-8")
            files.append(path)
    except Exception as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(out_dir)
    for f in files:
        print(f"  {f.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
