"""Run every experiment sweep and write one CSV per experiment.

    python scripts/run_experiments.py --out results --trials 10000 --workers 4
    python scripts/run_experiments.py --only pn_tb offset --trials 2000

Each CSV carries its full parameter set in the ``#`` preamble, so any output
can be regenerated from the file alone.
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from backscatter_wpt.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

# name -> (sweep variable, config, values, extra CLI flags)
EXPERIMENTS: dict[str, tuple[str, str, str, list[str]]] = {
    "pn_tb": ("tb", "pn_tb.conf", "5e-6:200e-6:5e-6", ["--scenario", "pn"]),
    "balanced_tb_ts5": ("tb", "balanced_ts5.conf", "5e-6:200e-6:5e-6", ["--scenario", "balanced"]),
    "balanced_tb_ts10": ("tb", "balanced_ts10.conf", "10e-6:200e-6:10e-6", ["--scenario", "balanced"]),
    "balanced_tb_ts20": ("tb", "balanced_ts20.conf", "20e-6:200e-6:20e-6", ["--scenario", "balanced"]),
    "balanced_ps": ("ps", "balanced_ts20.conf", "0.1,0.2,0.5,1,2,5,10", ["--scenario", "balanced"]),
    "balanced_m": ("m", "default.conf", "10,20,50,100,200,500,1000", ["--scenario", "balanced"]),
    "offset": ("offset", "offset.conf", "0:5e-6:0.25e-6", []),
    "mismatch": ("mismatch", "mismatch.conf", "6:15:1", ["--chips-per-symbol", "2,10,40"]),
    "interference": ("interference_db", "interference.conf", "0:50:5", []),
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", default=str(ROOT / "results"))
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--path", choices=("exact", "asymptotic"), default="exact")
    parser.add_argument("--only", nargs="*", choices=sorted(EXPERIMENTS))
    args = parser.parse_args(argv)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.only or EXPERIMENTS:
        variable, config, values, extra = EXPERIMENTS[name]
        cmd = [
            "sweep", variable, "--config", str(CONFIGS / config), "--values", values,
            "--trials", str(args.trials), "--seed", str(args.seed), "--workers", str(args.workers),
            "--path", args.path, "--out", str(out_dir / f"{name}.csv"), *extra,
        ]
        t0 = time.perf_counter()
        code = cli_main(cmd)
        print(f"{name:<18} exit {code}  {time.perf_counter() - t0:6.1f} s")
        if code:
            return code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
