"""Reproducible Monte Carlo estimate of the average harvested power.

Each trial draws channels, ambient symbols, a training sequence (PN only),
and correlator-output noise from its own substreams, then computes the
harvested power along one of two paths:

* ``exact``: correlator output -> retrodirective beam -> ``|sqrt(gamma2) f^T x_t|^2``
* ``asymptotic``: the large-M closed form in (|g|^2, mu, nu)

Per-trial results are stored by trial index and reduced in index order with
``math.fsum``, so the report does not depend on how many workers ran.
"""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DerivedParams, HarvesterModel, SystemParams, derive
from .correlator import correlate_closed_form, correlate_waveform, mu_nu
from .stochastics import (
    StreamPool,
    TrialSeed,
    sample_ambient,
    sample_channels,
    sample_g,
    sample_post_correlator_noise,
)
from .training import TrainingSequence, gen_balanced, gen_pn
from .wpt import DegenerateInputError, harvest, incident_power_asymptotic, incident_power_exact

SCENARIOS = ("pn", "balanced", "offset", "interference")
PATHS = ("exact", "asymptotic")
MAX_RESAMPLES = 10


class ScenarioError(ValueError):
    """Parameters are inconsistent with the requested scenario or path."""


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    q_rf: float
    q: float
    magnitude_ratio: float  # NaN when ||x_s|| == 0
    resamples: int = 0


@dataclass(frozen=True)
class RunReport:
    mean_q: float
    mean_q_rf: float
    mean_magnitude_ratio: float
    stderr_q: float
    trials: int
    master_seed: int
    path: str
    scenario: str
    params: SystemParams
    harvester: HarvesterModel
    ts_actual: float | None = None
    missing_ratios: int = 0
    resamples: int = 0


@dataclass(frozen=True)
class TrialContext:
    params: SystemParams
    harvester: HarvesterModel
    scenario: str
    path: str
    master_seed: int
    ts_actual: float | None = None
    zero_noise: bool = False
    derived: DerivedParams = field(init=False)
    fixed_sequence: TrainingSequence | None = field(init=False)
    n_symbols: int = field(init=False)

    def __post_init__(self):
        p = self.params
        check_scenario(p, self.scenario, self.path, self.ts_actual)
        object.__setattr__(self, "derived", derive(p))
        seq = None
        if self.scenario != "pn":
            seq = gen_balanced(p.ns, p.nc // p.ns, p.tc, pattern="alternating")
        object.__setattr__(self, "fixed_sequence", seq)
        n_sym = p.ns
        if self.ts_actual is not None:
            n_sym = math.ceil(p.nc * p.tc / self.ts_actual - 1e-9)
        object.__setattr__(self, "n_symbols", n_sym)


def check_scenario(params: SystemParams, scenario: str, path: str, ts_actual: float | None = None) -> None:
    if scenario not in SCENARIOS:
        raise ScenarioError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if path not in PATHS:
        raise ScenarioError(f"unknown path {path!r}; expected one of {PATHS}")
    if scenario != "offset" and params.t_off != 0:
        raise ScenarioError(f"t_off = {params.t_off} requires the offset scenario")
    if scenario != "interference" and params.sigma_i2 != 0:
        raise ScenarioError(f"sigma_i2 = {params.sigma_i2} requires the interference scenario")
    if scenario == "pn":
        if params.nc % params.ns and params.ns % params.nc:
            raise ScenarioError("pn scenario needs ns | nc or nc | ns")
    else:
        k, rem = divmod(params.nc, params.ns)
        if rem or k < 2 or k % 2:
            raise ScenarioError(
                f"{scenario} scenario needs an even number (>= 2) of chips per symbol, got nc/ns = {params.nc}/{params.ns}"
            )
    if ts_actual is not None:
        if path != "exact" or scenario != "balanced":
            raise ScenarioError("a mismatched symbol duration is only simulated on the exact path with balanced training")
        if not ts_actual > 0:
            raise ScenarioError("ts_actual must be > 0")


def _magnitude_ratio(xi_norm: float, xs_norm: float) -> float:
    return xi_norm / xs_norm if xs_norm > 0 else math.nan


def simulate_trial(ctx: TrialContext, trial_index: int) -> TrialResult:
    q_rf, ratio, resamples = _trial_values(ctx, trial_index)
    return TrialResult(trial_index, q_rf, harvest(q_rf, ctx.harvester), ratio, resamples)


def _trial_values(ctx: TrialContext, trial_index: int, pool: StreamPool | None = None) -> tuple[float, float, int]:
    """(incident power, magnitude ratio, resample count) for one trial."""
    p, d = ctx.params, ctx.derived
    streams = TrialSeed(ctx.master_seed, trial_index).streams(pool)
    ts = p.ts if ctx.ts_actual is None else ctx.ts_actual
    frame = sample_ambient(p, streams, ns=ctx.n_symbols, ts=ts)
    seq = ctx.fixed_sequence or gen_pn(p.nc, streams["chips"], p.tc)

    if ctx.path == "asymptotic":
        g = sample_g(p, streams)
        munu = mu_nu(frame, seq)
        key = ctx.scenario
        if key == "pn":
            key = "pn_le" if p.ns <= p.nc else "pn_ge"
        q_rf = incident_power_asymptotic(key, munu, abs(g) ** 2, p, d)
        xs = math.sqrt(d.gamma1 * d.gamma2 * munu.mu) * abs(g) / p.ns
        xi = math.sqrt(d.gamma3 * munu.nu) / max(p.ns, p.nc)
        return q_rf, _magnitude_ratio(xi, xs), 0

    channels = sample_channels(p, streams)
    window = p.nc * p.tc
    for attempt in range(MAX_RESAMPLES + 1):
        n_tilde = sample_post_correlator_noise(
            p.sigma_n2 / window, p.m, streams["noise"], zero=ctx.zero_noise
        )
        u_tilde = None
        if p.sigma_i2 > 0:
            u_tilde = sample_post_correlator_noise(p.sigma_i2 / window, p.m, streams["interference"])
        if ctx.scenario == "offset" or ctx.ts_actual is not None:
            out = correlate_waveform(
                p, channels, frame, seq, t_off=p.t_off, ts_actual=ts,
                n_tilde=n_tilde, u_tilde=u_tilde, derived=d,
            )
        else:
            out = correlate_closed_form(p, channels, frame, seq, n_tilde=n_tilde, u_tilde=u_tilde, derived=d)
        try:
            q_rf = incident_power_exact(out, channels, p, d)
        except DegenerateInputError:
            if attempt == MAX_RESAMPLES:
                raise
            channels = sample_channels(p, streams)
            frame = sample_ambient(p, streams, ns=ctx.n_symbols, ts=ts)
            continue
        ratio = _magnitude_ratio(float(np.linalg.norm(out.x_i)), float(np.linalg.norm(out.x_s)))
        return q_rf, ratio, attempt
    raise AssertionError("unreachable")


def _run_chunk(ctx: TrialContext, start: int, stop: int) -> np.ndarray:
    rows = np.empty((stop - start, 4))
    pool = StreamPool()
    for j, t in enumerate(range(start, stop)):
        q_rf, ratio, resamples = _trial_values(ctx, t, pool)
        rows[j] = (q_rf, 0.0, ratio, resamples)
    rows[:, 1] = harvest(rows[:, 0], ctx.harvester)
    return rows


def _mean(values: np.ndarray) -> float:
    return math.fsum(values) / len(values) if len(values) else math.nan


def _stderr(values: np.ndarray) -> float:
    n = len(values)
    if n < 2:
        return math.nan
    mean = _mean(values)
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return math.sqrt(var / n)


def run_trials(
    params: SystemParams,
    harvester: HarvesterModel,
    scenario: str,
    path: str,
    trials: int,
    master_seed: int,
    workers: int = 1,
    ts_actual: float | None = None,
    zero_noise: bool = False,
) -> RunReport:
    """Average harvested power over ``trials`` independent realizations."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ctx = TrialContext(params, harvester, scenario, path, master_seed, ts_actual, zero_noise)
    workers = max(1, min(workers, trials))
    if workers == 1:
        rows = _run_chunk(ctx, 0, trials)
    else:
        bounds = np.linspace(0, trials, 4 * workers + 1).astype(int)
        spans = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        mp = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=mp) as pool:
            futures = [pool.submit(_run_chunk, ctx, a, b) for a, b in spans]
            rows = np.concatenate([f.result() for f in futures])

    q_rf, q, ratio, resamples = rows.T
    ok = ~np.isnan(ratio)
    return RunReport(
        mean_q=_mean(q),
        mean_q_rf=_mean(q_rf),
        mean_magnitude_ratio=_mean(ratio[ok]),
        stderr_q=_stderr(q),
        trials=trials,
        master_seed=master_seed,
        path=path,
        scenario=scenario,
        params=params,
        harvester=harvester,
        ts_actual=ts_actual,
        missing_ratios=int((~ok).sum()),
        resamples=int(resamples.sum()),
    )


def magnitude_ratio_stat(
    params: SystemParams,
    trials: int,
    master_seed: int,
    scenario: str = "pn",
    workers: int = 1,
) -> float:
    """Mean of ``||x_i|| / ||x_s||`` at the correlator output (exact path)."""
    report = run_trials(params, HarvesterModel(), scenario, "exact", trials, master_seed, workers)
    return report.mean_magnitude_ratio
