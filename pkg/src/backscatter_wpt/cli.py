"""Command-line front end.

    python -m backscatter_wpt sweep tb --config configs/pn_tb.conf --values 5e-6:200e-6:5e-6 --scenario pn
    python -m backscatter_wpt validate
    python -m backscatter_wpt dump-sequence balanced --ns 2 --chips-per-symbol 4
    python -m backscatter_wpt dump-breakpoints --config configs/offset.conf --t-off 1e-6

Exit codes: 0 success, 1 validation failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, HarvesterModel, SystemParams, load_config
from .correlator import breakpoint_partition
from .engine import PATHS, SCENARIOS, ScenarioError
from .sweeps import SWEEPS, SweepError, SweepSpec, run_sweep, to_csv
from .training import SequenceError, gen_balanced, gen_lfsr, gen_pn, walsh_hadamard_row
from .validation import run_all


def parse_values(text: str) -> list[float]:
    """Comma list of numbers; an item ``start:stop:step`` expands inclusively."""
    out: list[float] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            start, stop, step = (float(x) for x in item.split(":"))
            n = int(round((stop - start) / step))
            out.extend(start + i * step for i in range(n + 1))
        else:
            out.append(float(item))
    return out


def _load(args) -> tuple[SystemParams, HarvesterModel]:
    if args.config is None:
        raise ConfigError("--config is required")
    return load_config(args.config)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="\n")


def cmd_sweep(args) -> int:
    params, harvester = _load(args)
    spec = SweepSpec(
        variable=args.variable,
        values=tuple(parse_values(args.values)),
        params=params,
        harvester=harvester,
        scenario=args.scenario,
        path=args.path,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        chips_per_symbol=tuple(int(v) for v in parse_values(args.chips_per_symbol)),
        interference_reference=args.interference_reference,
    )
    _write(to_csv(run_sweep(spec)), args.out)
    return 0


def cmd_validate(args) -> int:
    failed = 0
    for r in run_all(seed=args.seed, inject_fault=args.inject_fault):
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} {r.detail}")
        failed += not r.passed
    print(f"{failed} failing check(s)" if failed else "all checks passed")
    return 1 if failed else 0


def cmd_dump_sequence(args) -> int:
    if args.kind == "pn":
        seq = gen_pn(args.nc, np.random.default_rng(args.seed))
    elif args.kind == "balanced":
        seq = gen_balanced(args.ns, args.chips_per_symbol, pattern=args.pattern)
    elif args.kind == "walsh":
        seq = walsh_hadamard_row(args.order, args.row)
    else:
        seq = gen_lfsr(tuple(int(t) for t in args.taps.split(",")), args.nc)
    _write(",".join(str(int(c)) for c in seq.chips) + "\n", args.out)
    return 0


def cmd_dump_breakpoints(args) -> int:
    params, _ = _load(args)
    k = params.nc // params.ns
    seq = gen_balanced(params.ns, k, params.tc, pattern=args.pattern)
    ts_actual = args.ts_actual or params.ts
    n_sym = int(np.ceil(params.nc * params.tc / ts_actual - 1e-9))
    part = breakpoint_partition(seq.chips, params.tc, args.t_off, ts_actual, n_sym)
    lines = ["start,end,symbol,chip,replica,chip_x_replica"]
    for a, b, s, c, r in zip(part.start, part.end, part.symbol, part.chip, part.replica):
        lines.append(f"{a:.8e},{b:.8e},{s},{c},{r},{c * r}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="backscatter_wpt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    sw.add_argument("variable", choices=sorted(SWEEPS))
    sw.add_argument("--config", required=True)
    sw.add_argument("--values", required=True, help="comma list; start:stop:step expands")
    sw.add_argument("--scenario", choices=SCENARIOS, default="balanced")
    sw.add_argument("--path", choices=PATHS, default="exact")
    sw.add_argument("--trials", type=int, default=10_000)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--chips-per-symbol", default="2,10,40", help="mismatch sweep only")
    sw.add_argument("--interference-reference", choices=("backscatter", "direct"), default="backscatter")
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    va = sub.add_parser("validate", help="run the oracle and invariant checks")
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--inject-fault", action="store_true", help="flip one chip of each balanced sequence")
    va.set_defaults(func=cmd_validate)

    ds = sub.add_parser("dump-sequence", help="print a training sequence as one CSV row")
    ds.add_argument("kind", choices=("pn", "balanced", "walsh", "lfsr"))
    ds.add_argument("--nc", type=int, default=16)
    ds.add_argument("--ns", type=int, default=1)
    ds.add_argument("--chips-per-symbol", type=int, default=2)
    ds.add_argument("--pattern", choices=("halves", "alternating"), default="halves")
    ds.add_argument("--order", type=int, default=4)
    ds.add_argument("--row", type=int, default=1)
    ds.add_argument("--taps", default="5,3")
    ds.add_argument("--seed", type=int, default=0)
    ds.add_argument("--out")
    ds.set_defaults(func=cmd_dump_sequence)

    db = sub.add_parser("dump-breakpoints", help="print the correlator integration partition")
    db.add_argument("--config", required=True)
    db.add_argument("--t-off", type=float, default=0.0)
    db.add_argument("--ts-actual", type=float)
    db.add_argument("--pattern", choices=("halves", "alternating"), default="alternating")
    db.add_argument("--out")
    db.set_defaults(func=cmd_dump_breakpoints)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, SweepError, ScenarioError, SequenceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
