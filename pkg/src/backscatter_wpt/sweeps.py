"""Parameter sweeps behind each experiment, emitted as self-describing CSV."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from . import __version__
from .config import HarvesterModel, SystemParams, sigma_i2_from_ratio_db
from .engine import RunReport, run_trials

VARIABLES = ("tb", "ps", "m", "offset", "mismatch", "interference_db")


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]
    params: SystemParams
    harvester: HarvesterModel = field(default_factory=HarvesterModel)
    scenario: str = "balanced"
    path: str = "exact"
    trials: int = 10_000
    seed: int = 0
    workers: int = 1
    chips_per_symbol: tuple[int, ...] = (2, 10, 40)  # mismatch sweep only
    interference_reference: str = "backscatter"  # interference sweep only

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise SweepError(f"unknown sweep variable {self.variable!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise SweepError("sweep needs at least one value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise SweepError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)


def _integer_ratio(num: float, den: float, what: str) -> int:
    n = round(num / den)
    if n < 1 or abs(n * den - num) > 1e-9 * num:
        raise SweepError(f"{what}: {num!r} is not an integer multiple of {den!r}")
    return n


def _run(spec: SweepSpec, params: SystemParams, scenario=None, path=None, **kw) -> RunReport:
    return run_trials(
        params,
        spec.harvester,
        scenario or spec.scenario,
        path or spec.path,
        spec.trials,
        spec.seed,
        workers=spec.workers,
        **kw,
    )


def sweep_tb(spec: SweepSpec) -> SweepResult:
    """Backscatter-phase duration at fixed ts and tc; ns and nc follow from tb."""
    p = spec.params
    res = SweepResult(spec, ["tb", "ns", "nc", "mean_q", "stderr_q", "mean_q_rf", "mean_magnitude_ratio"])
    for tb in spec.values:
        ns = _integer_ratio(tb, p.ts, "tb vs ts")
        nc = _integer_ratio(tb, p.tc, "tb vs tc")
        r = _run(spec, p.replace(ns=ns, nc=nc))
        res.rows.append((tb, ns, nc, r.mean_q, r.stderr_q, r.mean_q_rf, r.mean_magnitude_ratio))
    return res


def sweep_ps(spec: SweepSpec) -> SweepResult:
    res = SweepResult(spec, ["ps", "mean_q", "stderr_q", "mean_q_rf"])
    for ps in spec.values:
        r = _run(spec, spec.params.replace(ps=ps))
        res.rows.append((ps, r.mean_q, r.stderr_q, r.mean_q_rf))
    return res


def _both_paths(spec: SweepSpec, params: SystemParams, **kw) -> tuple[RunReport, RunReport]:
    return _run(spec, params, path="exact", **kw), _run(spec, params, path="asymptotic", **kw)


def _rel_gap(exact: RunReport, asym: RunReport) -> float:
    return abs(exact.mean_q - asym.mean_q) / asym.mean_q if asym.mean_q else math.nan


def sweep_m(spec: SweepSpec) -> SweepResult:
    """Antenna count, with exact and asymptotic columns side by side."""
    res = SweepResult(
        spec, ["m", "mean_q_exact", "stderr_q_exact", "mean_q_asymptotic", "stderr_q_asymptotic", "rel_gap"]
    )
    for m in spec.values:
        ex, asy = _both_paths(spec, spec.params.replace(m=_integer_ratio(m, 1.0, "m")))
        res.rows.append((int(m), ex.mean_q, ex.stderr_q, asy.mean_q, asy.stderr_q, _rel_gap(ex, asy)))
    return res


def sweep_offset(spec: SweepSpec) -> SweepResult:
    """Correlator timing offset; the exact column integrates the offset waveforms."""
    p = spec.params
    res = SweepResult(
        spec, ["t_off", "t_off_over_tc", "mean_q_exact", "stderr_q_exact", "mean_q_asymptotic", "stderr_q_asymptotic"]
    )
    for t_off in spec.values:
        if t_off < 0:
            raise SweepError("offsets must be >= 0")
        ex, asy = _both_paths(spec, p.replace(t_off=t_off), scenario="offset")
        res.rows.append((t_off, t_off / p.tc, ex.mean_q, ex.stderr_q, asy.mean_q, asy.stderr_q))
    return res


def sweep_mismatch(spec: SweepSpec) -> SweepResult:
    """Actual symbols per backscatter phase ``ns'`` against the designed ``ns``.

    The tag keeps its designed chip timing (``tc = tb / (ns * k)``) while the
    ambient symbols last ``tb / ns'``. Only the exact waveform path applies.
    """
    p = spec.params
    tb = p.ns * p.ts
    res = SweepResult(spec, ["ns_actual", "ts_actual", "chips_per_symbol", "mean_q", "stderr_q"])
    for k in spec.chips_per_symbol:
        nc = p.ns * k
        design = p.replace(nc=nc, tc=tb / nc)
        for ns_actual in spec.values:
            n = _integer_ratio(ns_actual, 1.0, "ns_actual")
            ts_actual = tb / n
            r = _run(spec, design, scenario="balanced", path="exact", ts_actual=ts_actual)
            res.rows.append((n, ts_actual, k, r.mean_q, r.stderr_q))
    return res


def sweep_interference(spec: SweepSpec) -> SweepResult:
    """Signal-to-interference ratio in dB (``inf`` = no interference)."""
    p = spec.params
    res = SweepResult(
        spec,
        ["ratio_db", "sigma_i2", "mean_q_exact", "stderr_q_exact", "mean_q_asymptotic", "stderr_q_asymptotic"],
    )
    for db in spec.values:
        s2 = sigma_i2_from_ratio_db(p, db, spec.interference_reference)
        ex, asy = _both_paths(spec, p.replace(sigma_i2=s2), scenario="interference")
        res.rows.append((db, s2, ex.mean_q, ex.stderr_q, asy.mean_q, asy.stderr_q))
    return res


SWEEPS = {
    "tb": sweep_tb,
    "ps": sweep_ps,
    "m": sweep_m,
    "offset": sweep_offset,
    "mismatch": sweep_mismatch,
    "interference_db": sweep_interference,
}


def run_sweep(spec: SweepSpec) -> SweepResult:
    return SWEEPS[spec.variable](spec)


def _fmt(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.8e}"


def to_csv(result: SweepResult) -> str:
    """CSV text: ``#`` preamble with every input, then a header row and data rows."""
    spec = result.spec
    lines = [
        f"# tool = backscatter_wpt {__version__}",
        f"# sweep = {spec.variable}",
        f"# values = {','.join(repr(v) for v in spec.values)}",
        f"# scenario = {spec.scenario}",
        f"# path = {spec.path}",
        f"# trials = {spec.trials}",
        f"# seed = {spec.seed}",
    ]
    if spec.variable == "mismatch":
        lines.append(f"# chips_per_symbol = {','.join(map(str, spec.chips_per_symbol))}")
    if spec.variable == "interference_db":
        lines.append(f"# interference_reference = {spec.interference_reference}")
    lines += [f"# {k} = {v!r}" for k, v in asdict(spec.params).items()]
    lines += [f"# {k} = {v!r}" for k, v in asdict(spec.harvester).items()]
    lines.append(",".join(result.columns))
    lines += [",".join(_fmt(v) for v in row) for row in result.rows]
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> tuple[dict[str, str], list[dict[str, float]]]:
    """Parse a sweep CSV back into (preamble, rows)."""
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif line:
            body.append(line.split(","))
    header, *data = body
    return meta, [{k: float(v) for k, v in zip(header, row)} for row in data]
