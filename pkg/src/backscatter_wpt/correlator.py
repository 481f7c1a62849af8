"""Correlator outputs at the energy transmitter.

Two independent routes are provided:

* ``correlate_closed_form`` evaluates the per-window sums directly
  (synchronized receiver, one of ns/nc divides the other).
* ``correlate_waveform`` builds the step-function signals, splits
  ``[0, nc*tc]`` at every symbol, chip and replica edge, and sums
  interval-length-weighted products. Because every waveform is piecewise
  constant this integral is exact, and it also covers timing offsets and a
  mismatched ambient symbol duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DerivedParams, SystemParams, derive
from .stochastics import AmbientFrame, ChannelRealization
from .training import TrainingSequence, window_sums


class RegimeError(ValueError):
    """Neither ns | nc nor nc | ns; only the waveform route applies."""


@dataclass(frozen=True)
class CorrelatorOutput:
    x_s: np.ndarray
    x_i: np.ndarray
    u_tilde: np.ndarray
    n_tilde: np.ndarray

    @property
    def x_r(self) -> np.ndarray:
        return self.x_s + self.x_i + self.u_tilde + self.n_tilde


@dataclass(frozen=True)
class MuNu:
    mu: float
    nu: float


def _ambient_chip_sum(symbols: np.ndarray, chips: np.ndarray) -> complex:
    """``sum_i sum_{n overlapping i} c_n s_i`` for the divisible regimes."""
    ns, nc = len(symbols), len(chips)
    if nc % ns == 0:
        return complex(np.dot(window_sums(chips, ns), symbols))
    if ns % nc == 0:
        per_chip = symbols.reshape(nc, ns // nc).sum(axis=1)
        return complex(np.dot(chips, per_chip))
    raise RegimeError(f"ns={ns} and nc={nc}: neither divides the other")


def mu_nu(frame: AmbientFrame, seq: TrainingSequence) -> MuNu:
    s = frame.symbols
    mu = abs(s.sum()) ** 2
    nu = abs(_ambient_chip_sum(s, seq.chips)) ** 2
    return MuNu(float(mu), float(nu))


def _zeros(m: int) -> np.ndarray:
    return np.zeros(m, dtype=complex)


def correlate_closed_form(
    params: SystemParams,
    channels: ChannelRealization,
    frame: AmbientFrame,
    seq: TrainingSequence,
    n_tilde: np.ndarray | None = None,
    u_tilde: np.ndarray | None = None,
    derived: DerivedParams | None = None,
) -> CorrelatorOutput:
    """Synchronized correlator output from the per-window sums."""
    d = derived or derive(params)
    ns, nc = frame.ns, seq.nc
    v = _ambient_chip_sum(frame.symbols, seq.chips)
    a = math.sqrt(d.gamma1 * d.gamma2 * frame.ps) * channels.g * frame.symbols.sum() / ns
    b = math.sqrt(d.gamma3 * frame.ps) * v / max(ns, nc)
    m = len(channels.f)
    return CorrelatorOutput(
        x_s=a * channels.f,
        x_i=b * channels.h,
        u_tilde=_zeros(m) if u_tilde is None else u_tilde,
        n_tilde=_zeros(m) if n_tilde is None else n_tilde,
    )


@dataclass(frozen=True)
class Partition:
    """Breakpoint partition of the correlation window.

    For interval ``k``: ``[start[k], end[k])``, received symbol index
    ``symbol[k]``, transmitted chip ``chip[k]`` and local replica chip
    ``replica[k]``.
    """

    start: np.ndarray
    end: np.ndarray
    symbol: np.ndarray
    chip: np.ndarray
    replica: np.ndarray

    @property
    def length(self) -> np.ndarray:
        return self.end - self.start


def breakpoint_partition(
    chips: np.ndarray, tc: float, t_off: float, ts_actual: float, n_symbols: int
) -> Partition:
    """Split ``[0, nc*tc]`` at every edge of the three step functions.

    The local replica is delayed by ``t_off`` and extended periodically, so at
    time ``t`` it holds chip ``floor((t - t_off)/tc) mod nc``.
    """
    chips = np.asarray(chips)
    nc = len(chips)
    window = nc * tc
    needed = math.ceil(window / ts_actual - 1e-9)
    if n_symbols < needed:
        raise ValueError(f"frame holds {n_symbols} symbols, window needs {needed}")
    shift = math.fmod(t_off, window)
    edges = np.concatenate(
        [
            np.arange(nc + 1) * tc,
            math.fmod(shift, tc) + np.arange(nc + 1) * tc,
            np.arange(needed + 1) * ts_actual,
        ]
    )
    edges = np.unique(np.clip(edges, 0.0, window))
    # collapse float near-duplicates (e.g. 10*tc vs 1*ts)
    keep = np.concatenate([[True], np.diff(edges) > 1e-12 * window])
    edges = edges[keep]
    edges[-1] = window
    start, end = edges[:-1], edges[1:]
    mid = 0.5 * (start + end)
    chip_idx = np.minimum((mid // tc).astype(np.int64), nc - 1)
    rep_idx = np.floor((mid - shift) / tc).astype(np.int64) % nc
    sym_idx = np.minimum((mid // ts_actual).astype(np.int64), needed - 1)
    return Partition(start, end, sym_idx, chips[chip_idx], chips[rep_idx])


def waveform_integrals(
    frame: AmbientFrame, seq: TrainingSequence, t_off: float = 0.0, ts_actual: float | None = None
) -> tuple[complex, complex]:
    """Normalized integrals of ``s c c_loc`` and ``s c_loc`` (unit-power symbols)."""
    ts_actual = frame.ts if ts_actual is None else ts_actual
    part = breakpoint_partition(seq.chips, seq.tc, t_off, ts_actual, frame.ns)
    s = frame.symbols[part.symbol]
    w = part.length / (seq.nc * seq.tc)
    backscatter = complex(np.sum(w * s * part.chip * part.replica))
    direct = complex(np.sum(w * s * part.replica))
    return backscatter, direct


def correlate_waveform(
    params: SystemParams,
    channels: ChannelRealization,
    frame: AmbientFrame,
    seq: TrainingSequence,
    t_off: float = 0.0,
    ts_actual: float | None = None,
    n_tilde: np.ndarray | None = None,
    u_tilde: np.ndarray | None = None,
    derived: DerivedParams | None = None,
) -> CorrelatorOutput:
    """Correlator output by exact integration of the piecewise-constant waveforms.

    ``ts_actual`` is the duration of the symbols actually on air (defaults to
    ``frame.ts``); the tag still switches at multiples of ``seq.tc``.
    """
    d = derived or derive(params)
    backscatter, direct = waveform_integrals(frame, seq, t_off, ts_actual)
    a = math.sqrt(d.gamma1 * d.gamma2 * frame.ps) * channels.g * backscatter
    b = math.sqrt(d.gamma3 * frame.ps) * direct
    m = len(channels.f)
    return CorrelatorOutput(
        x_s=a * channels.f,
        x_i=b * channels.h,
        u_tilde=_zeros(m) if u_tilde is None else u_tilde,
        n_tilde=_zeros(m) if n_tilde is None else n_tilde,
    )


def offset_scale(t_off: float, tc: float) -> float:
    """Desired-component scale under a replica delay, for chip-alternating sequences.

    ``1 - 2 t/tc`` on ``[0, tc]`` and ``2 t/tc - 3`` on ``(tc, 2 tc]``, repeated
    with period ``2 tc``: a one-chip shift of an alternating replica flips its
    sign and a two-chip shift restores it.
    """
    if t_off < 0:
        raise ValueError(f"t_off must be >= 0, got {t_off}")
    r = math.fmod(t_off, 2.0 * tc) / tc
    if t_off > 0 and r == 0.0:
        r = 2.0
    return 1.0 - 2.0 * r if r <= 1.0 else 2.0 * r - 3.0
