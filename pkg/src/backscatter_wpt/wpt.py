"""Power-transfer phase: retrodirective beam, incident RF power, harvester."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .config import DerivedParams, HarvesterModel, SystemParams, derive
from .correlator import CorrelatorOutput, MuNu, offset_scale
from .stochastics import ChannelRealization

SCENARIOS = ("pn_le", "pn_ge", "balanced", "offset", "interference")


class DegenerateInputError(ValueError):
    """Correlator output has zero norm, so there is no direction to beam along."""


@dataclass(frozen=True)
class BeamSignal:
    x_t: np.ndarray


@dataclass(frozen=True)
class PowerSample:
    q_rf: float
    q: float


def retro_beam(x_r: np.ndarray, pt: float) -> BeamSignal:
    """Conjugate beam ``sqrt(pt) * conj(x_r) / ||x_r||``."""
    norm = np.linalg.norm(x_r)
    if not norm > 0 or not np.isfinite(norm):
        raise DegenerateInputError("cannot beamform on a zero correlator output")
    return BeamSignal(np.sqrt(pt) * np.conj(x_r) / norm)


def incident_power_exact(
    out: CorrelatorOutput,
    channels: ChannelRealization,
    params: SystemParams,
    derived: DerivedParams | None = None,
) -> float:
    """``|sqrt(gamma2) f^T x_t|^2`` for the retrodirective beam built from ``out``."""
    d = derived or derive(params)
    x_t = retro_beam(out.x_r, params.pt).x_t
    r_er = np.sqrt(d.gamma2) * np.dot(channels.f, x_t)
    return float(abs(r_er) ** 2)


def incident_power_asymptotic(
    scenario: str,
    munu: MuNu,
    g_abs2: float,
    params: SystemParams,
    derived: DerivedParams | None = None,
    literal_offset: bool = False,
) -> float:
    """Large-M incident RF power for one realization of (|g|^2, mu, nu).

    Scenarios:
        ``pn_le`` / ``pn_ge``: pseudo-random training, ns <= nc / ns >= nc.
        ``balanced``: ambient term cancelled (nu dropped).
        ``offset``: balanced training with the replica delayed by ``params.t_off``.
        ``interference``: adds ``sigma_i2 * ns / ts`` beside the noise term.

    For ``offset`` the squared offset scale multiplies the backscatter term in
    both numerator and denominator, which is the large-M limit of the exact
    quotient; ``literal_offset=True`` scales the numerator only.
    """
    d = derived or derive(params)
    m = params.m
    gain = m + 1.0 / params.m_f
    sig = d.gamma1 * d.gamma2 * g_abs2 * munu.mu
    noise = params.sigma_n2 * params.ns / (params.ts * params.ps)
    if scenario == "pn_le":
        amb = d.gamma3 * munu.nu * (params.ns / params.nc) ** 2
        num, den = sig * gain + amb + noise, sig + amb + noise
    elif scenario == "pn_ge":
        amb = d.gamma3 * munu.nu
        num, den = sig * gain + amb + noise, sig + amb + noise
    elif scenario == "balanced":
        num, den = sig * gain + noise, sig + noise
    elif scenario == "offset":
        k2 = offset_scale(params.t_off, params.tc) ** 2
        num = k2 * sig * gain + noise
        den = (sig if literal_offset else k2 * sig) + noise
    elif scenario == "interference":
        ps = params.ps
        amb = ps * d.gamma3 * munu.nu * (params.ns / params.nc) ** 2
        intf = params.sigma_i2 * params.ns / params.ts
        noise_w = params.sigma_n2 * params.ns / params.ts
        num = ps * sig * gain + amb + intf + noise_w
        den = ps * sig + amb + intf + noise_w
    else:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    return float(d.gamma2 * params.pt * num / den)


def harvest(q_rf, model: HarvesterModel):
    """Logistic rectifier output, zero at zero input and saturating below ``c0``.

    Works on scalars and arrays; ``expit`` keeps large inputs from overflowing.
    """
    q_rf = np.asarray(q_rf, dtype=float)
    if np.any(q_rf < 0):
        raise ValueError("incident power must be non-negative")
    # c0 * (1 - sigma(a0 (b0 - x)) / sigma(a0 b0)), rearranged to avoid cancellation near 0
    ax = model.a0 * q_rf
    q = model.c0 * -np.expm1(-ax) * expit(ax - model.a0 * model.b0)
    return float(q) if q.ndim == 0 else q
