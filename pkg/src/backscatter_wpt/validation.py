"""Self-check suite: oracle equivalence, cancellation identities, moments.

Each check returns a :class:`CheckResult`; ``run_all`` runs every check and
the CLI turns any failure into a nonzero exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import HarvesterModel, SystemParams, derive
from .correlator import MuNu, correlate_closed_form, correlate_waveform, offset_scale
from .stochastics import AmbientFrame, ChannelRealization, sample_complex_gaussian, sample_nakagami_vector
from .training import TrainingSequence, gen_balanced, hadamard
from .wpt import harvest, incident_power_asymptotic


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_instance(rng: np.random.Generator, ns: int, nc: int, m: int = 8, ts: float = 5e-6):
    """Random params/channels/frame for correlator checks."""
    params = SystemParams(ns=ns, nc=nc, ts=ts, tc=ns * ts / nc, m=m)
    channels = ChannelRealization(
        g=complex(sample_complex_gaussian(1, rng)[0]),
        f=sample_complex_gaussian(m, rng),
        h=sample_complex_gaussian(m, rng),
    )
    frame = AmbientFrame(sample_complex_gaussian(ns, rng), params.ps, ts)
    return params, channels, frame


def check_closed_form_vs_waveform(rng: np.random.Generator, instances: int = 200, rtol: float = 1e-9) -> CheckResult:
    worst = 0.0
    for j in range(instances):
        if j % 2:
            ns = int(rng.integers(1, 21))
            nc = ns * int(rng.integers(1, 11))
        else:
            nc = int(rng.integers(1, 21))
            ns = nc * int(rng.integers(1, 11))
        params, ch, frame = random_instance(rng, ns, nc)
        seq = TrainingSequence(1 - 2 * rng.integers(0, 2, nc), params.tc, "pn")
        cf = correlate_closed_form(params, ch, frame, seq)
        wf = correlate_waveform(params, ch, frame, seq)
        # a chance-balanced PN draw makes x_i vanish, so compare against each
        # component's own scale rather than the (possibly zero) output norm
        d = derive(params)
        scale_s = math.sqrt(d.gamma1 * d.gamma2 * params.ps) * abs(ch.g) * np.linalg.norm(ch.f)
        scale_i = math.sqrt(d.gamma3 * params.ps) * np.linalg.norm(ch.h)
        worst = max(
            worst,
            float(np.linalg.norm(cf.x_s - wf.x_s) / scale_s),
            float(np.linalg.norm(cf.x_i - wf.x_i) / scale_i),
        )
    return CheckResult("closed_form_vs_waveform", worst < rtol, f"max relative deviation {worst:.3e} (tol {rtol:g})")


def _random_balanced(rng: np.random.Generator, ns: int, k: int, tc: float) -> TrainingSequence:
    window = np.array([1] * (k // 2) + [-1] * (k // 2))
    chips = np.concatenate([rng.permutation(window) for _ in range(ns)])
    return TrainingSequence(chips, tc, "custom")


def check_balanced_cancellation(
    rng: np.random.Generator, instances: int = 200, atol: float = 1e-12, inject_fault: bool = False
) -> CheckResult:
    worst = 0.0
    for j in range(instances):
        ns = int(rng.integers(1, 21))
        k = 2 * int(rng.integers(1, 21))
        params, ch, frame = random_instance(rng, ns, ns * k)
        kind = j % 3
        if kind == 0:
            seq = gen_balanced(ns, k, params.tc)
        elif kind == 1:
            seq = gen_balanced(ns, k, params.tc, pattern="alternating")
        else:
            seq = _random_balanced(rng, ns, k, params.tc)
        if inject_fault:
            chips = seq.chips.copy()
            chips[0] = -chips[0]
            seq = TrainingSequence(chips, seq.tc, seq.kind)
        out = correlate_closed_form(params, ch, frame, seq)
        d = derive(params)
        ref = math.sqrt(d.gamma3 * params.ps) * np.linalg.norm(ch.h)
        worst = max(worst, float(np.linalg.norm(out.x_i) / ref))
    return CheckResult("balanced_cancellation", worst <= atol, f"max ||x_i|| / (sqrt(g3 ps)||h||) = {worst:.3e}")


def check_offset_law(rng: np.random.Generator, instances: int = 50, rtol: float = 1e-9) -> CheckResult:
    worst_s, worst_i = 0.0, 0.0
    for _ in range(instances):
        ns = int(rng.integers(1, 11))
        k = 2 * int(rng.integers(1, 6))
        params, ch, frame = random_instance(rng, ns, ns * k)
        seq = gen_balanced(ns, k, params.tc, pattern="alternating")
        t_off = float(rng.uniform(0.0, 2.0 * params.tc))
        sync = correlate_waveform(params, ch, frame, seq)
        off = correlate_waveform(params, ch, frame, seq, t_off=t_off)
        expected = offset_scale(t_off, params.tc) * sync.x_s
        worst_s = max(worst_s, float(np.linalg.norm(off.x_s - expected) / np.linalg.norm(sync.x_s)))
        d = derive(params)
        ref = math.sqrt(d.gamma3 * params.ps) * np.linalg.norm(ch.h)
        worst_i = max(worst_i, float(np.linalg.norm(off.x_i) / ref))
    ok = worst_s < rtol and worst_i < 1e-12
    return CheckResult("offset_law", ok, f"x_s deviation {worst_s:.3e}, residual x_i {worst_i:.3e}")


def check_hadamard(max_order: int = 64) -> CheckResult:
    order = 2
    while order <= max_order:
        h = hadamard(order).astype(np.int64)
        if not np.array_equal(h @ h.T, order * np.eye(order, dtype=np.int64)):
            return CheckResult("hadamard", False, f"rows not orthogonal at order {order}")
        if np.any(h[1:].sum(axis=1) != 0):
            return CheckResult("hadamard", False, f"non-zero row sum at order {order}")
        order *= 2
    return CheckResult("hadamard", True, f"orders 2..{max_order}: orthogonal, zero-sum rows")


def check_fourth_moment(
    rng: np.random.Generator, m: int = 500, trials: int = 1000, rtol: float = 0.02
) -> CheckResult:
    parts, ok = [], True
    for m_f in (1.0, 10.0):
        norms = np.array([np.sum(np.abs(sample_nakagami_vector(m_f, m, rng)) ** 2) for _ in range(trials)])
        est = float(np.mean(norms**2) / m)
        target = m + 1.0 / m_f
        ok &= abs(est - target) <= rtol * target
        parts.append(f"m_f={m_f:g}: {est:.2f} vs {target:.2f}")
    return CheckResult("fourth_moment", ok, "; ".join(parts))


def check_reductions(rng: np.random.Generator, instances: int = 200, rtol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(instances):
        ns = int(rng.integers(1, 21))
        params = SystemParams(
            ns=ns, nc=2 * ns, tc=2.5e-6, m=int(rng.integers(1, 1001)), m_f=float(rng.uniform(0.5, 20)),
            ps=float(rng.uniform(0.1, 10)), sigma_n2=float(10 ** rng.uniform(-20, -16)),
        )
        mn = MuNu(float(rng.exponential(ns)), 0.0)
        g2 = float(rng.exponential())
        pn = incident_power_asymptotic("pn_le", mn, g2, params)
        pairs = [
            (incident_power_asymptotic("balanced", mn, g2, params), pn),
            (incident_power_asymptotic("interference", mn, g2, params), pn),
            (incident_power_asymptotic("offset", mn, g2, params), incident_power_asymptotic("balanced", mn, g2, params)),
        ]
        mn_nu = MuNu(mn.mu, float(rng.exponential(ns)))
        pairs.append(
            (incident_power_asymptotic("interference", mn_nu, g2, params), incident_power_asymptotic("pn_le", mn_nu, g2, params))
        )
        worst = max(worst, max(abs(a - b) / abs(b) for a, b in pairs))
    return CheckResult("algebraic_reductions", worst <= rtol, f"max relative deviation {worst:.3e}")


def check_harvester(rng: np.random.Generator, samples: int = 10_000) -> CheckResult:
    model = HarvesterModel()
    q0 = harvest(0.0, model)
    qb = harvest(model.b0, model)
    x = np.sort(rng.uniform(0.0, 0.02, samples))
    q = harvest(x, model)
    ok = q0 == 0.0 and abs(qb * 1e3 - 11.5574019912) <= 1e-6 and bool(np.all(np.diff(q) >= 0)) and bool(np.all(q < model.c0))
    return CheckResult("harvester", ok, f"q(0)={q0!r}, q(b0)={qb * 1e3:.9f} mW")


def run_all(seed: int = 0, inject_fault: bool = False) -> list[CheckResult]:
    ss = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(s) for s in ss.spawn(6)]
    return [
        check_closed_form_vs_waveform(rngs[0]),
        check_balanced_cancellation(rngs[1], inject_fault=inject_fault),
        check_offset_law(rngs[2]),
        check_hadamard(),
        check_fourth_moment(rngs[3]),
        check_reductions(rngs[4]),
        check_harvester(rngs[5]),
    ]
