"""Find the path-loss exponent that puts balanced training at a target power.

    python scripts/calibrate_alpha.py --config configs/balanced_ts5.conf --target-uw 50

The same seed is used for every alpha, so the estimated mean power is a smooth
function of alpha and a bracketing root finder converges cleanly.
"""

from __future__ import annotations

import argparse

from scipy.optimize import brentq

from backscatter_wpt.config import load_config
from backscatter_wpt.engine import run_trials


def mean_power(alpha: float, params, harvester, trials: int, seed: int, path: str) -> float:
    return run_trials(params.replace(alpha=alpha), harvester, "balanced", path, trials, seed).mean_q


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--config", default="configs/balanced_ts5.conf")
    parser.add_argument("--target-uw", type=float, default=50.0)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--path", choices=("exact", "asymptotic"), default="asymptotic")
    parser.add_argument("--bracket", type=float, nargs=2, default=(2.3, 2.8))
    args = parser.parse_args(argv)

    params, harvester = load_config(args.config)
    target = args.target_uw * 1e-6

    def gap(alpha: float) -> float:
        return mean_power(alpha, params, harvester, args.trials, args.seed, args.path) - target

    alpha = brentq(gap, *args.bracket, xtol=1e-4)
    q = mean_power(alpha, params, harvester, args.trials, args.seed, args.path)
    print(f"alpha = {alpha:.4f} -> mean_q = {q * 1e6:.2f} uW ({args.path}, {args.trials} trials, seed {args.seed})")
    rounded = round(alpha, 2)
    q_rounded = mean_power(rounded, params, harvester, args.trials, args.seed, args.path)
    print(f"alpha = {rounded:.2f} -> mean_q = {q_rounded * 1e6:.2f} uW")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
