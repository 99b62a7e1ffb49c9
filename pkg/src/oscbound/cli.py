"""Command-line front end.

Exit codes: 0 success / all suitable, 2 negative domain verdict
(unsuitable device, sync violation, table mismatch), 1 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import catalog, units
from .clock_model import SyncRequirement, sync_ok
from .clock_sim import AgingFit, aging_fit_compare, simulate, summarize
from .error_budget import AgingSpec, evaluate
from .errors import OscboundError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which we reserve for verdicts
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _duration(text: str) -> float:
    try:
        return units.parse_duration(text)
    except OscboundError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _durations(text: str) -> list[float]:
    return [_duration(p) for p in text.split(",") if p.strip()]


def _fraction(text: str) -> float:
    try:
        return units.parse_fraction(text)
    except OscboundError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_evaluate(args) -> int:
    specs, expected = [], []
    for path in args.spec or []:
        specs += catalog.read_spec_file(path).entries
        expected += [None] * (len(specs) - len(expected))
    for name in args.device or []:
        entry = catalog.lookup(name)
        specs.append(entry.spec)
        expected.append(None)
    if args.table is not None:
        for entry in catalog.catalog_table(args.table):
            specs.append(entry.spec)
            expected.append(entry.expected if args.treset == catalog.TABLE_T_R else None)
    if not specs:
        raise OscboundError("nothing to evaluate: give --spec, --device or --table")
    t_ls = args.tl
    for t_l in t_ls:
        if not t_l > 0:
            raise OscboundError("--tl values must be positive")
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda s: evaluate(s, args.treset, t_ls), specs))
    layout = catalog.TableLayout(args.b_unit, {}, args.tmax_unit)
    sys.stdout.write(
        catalog.render_report(results, args.format, layout=layout, expected=expected, breakdown=True)
    )
    n_ok = sum(1 for r in results if r.suitable)
    summary = f"{n_ok}/{len(results)} devices suitable at T_R = {units.format_duration(args.treset)}"
    sys.stdout.write(("# " if args.format == "csv" else "\n") + summary + "\n")
    return EXIT_OK if n_ok == len(results) else EXIT_NEGATIVE


def cmd_catalog(args) -> int:
    text, ok = catalog.render_table(args.table, args.format)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_simulate(args) -> int:
    text = Path(args.scenario).read_text(encoding="utf-8")
    config = catalog.parse_scenario(text, duration=args.duration)
    traj = simulate(config, args.duration)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            traj.write_csv(fh, every=args.every)
    elif args.out == "-":
        traj.write_csv(sys.stdout, every=args.every)
    s = summarize(traj, config)
    fv = s["first_violation_s"]
    lines = [
        f"samples={int(s['samples'])}",
        f"max_abs_delta_t_s={s['max_abs_delta_t_s']:.6f}",
        f"max_abs_delta_t_min={s['max_abs_delta_t_s'] / 60:.2f}",
        f"final_delta_t_s={s['final_delta_t_s']:.6f}",
        f"first_violation_s={'none' if fv is None else f'{fv:.3f}'}",
        f"bound_margin_s={round(s['bound_margin_s'], 6) + 0.0:.6f}",
        f"bound_usage={s['bound_usage']:.6f}",
        f"violations={len(traj.violations)}",
    ]
    sys.stdout.write("".join(f"# {line}\n" for line in lines))
    return EXIT_NEGATIVE if traj.violations else EXIT_OK


def cmd_check(args) -> int:
    if args.trajectory:
        worst, first = 0.0, None
        with open(args.trajectory, encoding="utf-8") as fh:
            rows = (line for line in fh if not line.startswith("#"))
            for row in csv.DictReader(rows):
                d = float(row["delta_t_s"])
                worst = max(worst, abs(d))
                if first is None and abs(d) > args.tl:
                    first = float(row["t_s"])
        verdict = first is None
        sys.stdout.write(
            f"max_abs_delta_t_s={worst:.6f} first_violation_s={'none' if first is None else first} "
            f"{'ok' if verdict else 'violation'}\n"
        )
    elif args.delta_t is not None:
        verdict = sync_ok(args.delta_t, SyncRequirement(args.tl, args.treset))
        sys.stdout.write(f"|delta_T| = {abs(args.delta_t):.6f} s <= T_L = {args.tl} s: {'ok' if verdict else 'violation'}\n")
    else:
        raise OscboundError("check needs --delta-t or --trajectory")
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_fit_compare(args) -> int:
    for name in ("yage", "tdata", "horizon"):
        if not getattr(args, name) > 0:
            raise OscboundError(f"--{name} must be positive")
    step = args.step if args.step is not None else args.horizon / 100.0
    if not step > 0:
        raise OscboundError("--step must be positive")
    aging = AgingSpec(args.yage, args.tdata)
    table = aging_fit_compare(
        aging,
        AgingFit.secant_linear(aging, args.knee),
        AgingFit.default_log(aging, args.knee),
        args.horizon,
        step,
    )
    sys.stdout.write(table.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oscbound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("evaluate", help="misalignment bound, T_R,max and verdict per device")
    e.add_argument("--spec", action="append", metavar="FILE", help="spec file (repeatable)")
    e.add_argument("--device", action="append", metavar="NAME", help="catalog device (repeatable)")
    e.add_argument("--table", type=int, choices=(2, 3), help="evaluate every device of a catalog table")
    e.add_argument("--treset", type=_duration, default=catalog.TABLE_T_R, metavar="DUR")
    e.add_argument("--tl", type=_durations, default=[165.0], metavar="DUR[,DUR...]")
    e.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    e.add_argument("--b-unit", choices=tuple(catalog.DISPLAY_UNITS), default="s")
    e.add_argument("--tmax-unit", choices=tuple(catalog.DISPLAY_UNITS), default="days")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("catalog", help="reproduce a published table with PASS/FAIL checks")
    c.add_argument("--table", type=int, choices=(2, 3), required=True)
    c.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    c.set_defaults(func=cmd_catalog)

    s = sub.add_parser("simulate", help="simulate a scenario and write the trajectory CSV")
    s.add_argument("--scenario", required=True, metavar="FILE")
    s.add_argument("--duration", type=_duration, required=True, metavar="DUR")
    s.add_argument("--out", metavar="FILE", help="trajectory CSV path, '-' for stdout")
    s.add_argument("--every", type=int, default=1, metavar="N", help="write every N-th sample")
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("check", help="loose-sync check of a misalignment or a trajectory CSV")
    k.add_argument("--tl", type=_duration, required=True, metavar="DUR")
    k.add_argument("--treset", type=_duration, default=catalog.TABLE_T_R, metavar="DUR")
    k.add_argument("--delta-t", type=_duration, metavar="DUR")
    k.add_argument("--trajectory", metavar="FILE")
    k.set_defaults(func=cmd_check)

    f = sub.add_parser("fit-compare", help="aging fits against the prudential bound (CSV)")
    f.add_argument("--yage", type=_fraction, required=True, metavar="VAL")
    f.add_argument("--tdata", type=_duration, required=True, metavar="DUR")
    f.add_argument("--horizon", type=_duration, required=True, metavar="DUR")
    f.add_argument("--step", type=_duration, metavar="DUR")
    f.add_argument("--knee", type=_duration, default=30 * units.DAY, metavar="DUR")
    f.set_defaults(func=cmd_fit_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OscboundError, OSError) as exc:
        print(f"oscbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
