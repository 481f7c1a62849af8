"""Random primitives and the per-trial stream-splitting scheme.

Every (master_seed, trial_index, label) triple maps to its own Philox key, so a
trial always consumes the same random numbers no matter how trials are
distributed over workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigError, SystemParams

LABELS = ("channel_g", "channel_f", "channel_h", "symbols", "noise", "interference", "chips")
_LABEL_ID = {name: i for i, name in enumerate(LABELS)}
_LABEL_BITS = 4
_MAX_TRIAL = (1 << (64 - _LABEL_BITS)) - 1


@dataclass(frozen=True)
class TrialSeed:
    master_seed: int
    trial_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if not 0 <= self.trial_index <= _MAX_TRIAL:
            raise ValueError(f"trial_index out of range: {self.trial_index}")

    def key(self, label: str) -> np.ndarray:
        return np.array(
            [self.master_seed, (self.trial_index << _LABEL_BITS) | _LABEL_ID[label]],
            dtype=np.uint64,
        )

    def stream(self, label: str) -> np.random.Generator:
        """Fresh generator for one labelled substream of this trial."""
        return np.random.Generator(np.random.Philox(key=self.key(label)))

    def streams(self, pool: "StreamPool | None" = None) -> "TrialStreams":
        return TrialStreams(self, pool)


class StreamPool:
    """One reusable Philox generator per label, rekeyed for each trial.

    Rekeying through the state setter is several times cheaper than building a
    new bit generator and yields the identical stream. Streams handed out for
    one trial are invalidated when the next trial binds the same label, so a
    pool must only serve trials sequentially.
    """

    def __init__(self):
        self._bitgens = {name: np.random.Philox(0) for name in LABELS}
        self._gens = {name: np.random.Generator(bg) for name, bg in self._bitgens.items()}

    def bind(self, label: str, key: np.ndarray) -> np.random.Generator:
        self._bitgens[label].state = {
            "bit_generator": "Philox",
            "state": {"counter": np.zeros(4, dtype=np.uint64), "key": key},
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gens[label]


class TrialStreams:
    """Lazily created, cached substreams of one trial.

    Repeated draws from the same label continue that label's stream, which is
    what a resampled trial needs.
    """

    def __init__(self, seed: TrialSeed, pool: StreamPool | None = None):
        self.seed = seed
        self._pool = pool
        self._cache: dict[str, np.random.Generator] = {}

    def __getitem__(self, label: str) -> np.random.Generator:
        rng = self._cache.get(label)
        if rng is None:
            if self._pool is None:
                rng = self.seed.stream(label)
            else:
                rng = self._pool.bind(label, self.seed.key(label))
            self._cache[label] = rng
        return rng


@dataclass(frozen=True)
class ChannelRealization:
    g: complex
    f: np.ndarray
    h: np.ndarray


@dataclass(frozen=True)
class AmbientFrame:
    """Unit-power ambient symbols; ``sqrt(ps)`` is applied when forming signals."""

    symbols: np.ndarray
    ps: float
    ts: float

    @property
    def ns(self) -> int:
        return len(self.symbols)


def sample_complex_gaussian(n: int, rng: np.random.Generator, variance: float = 1.0) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    z = rng.standard_normal(2 * n)
    return scale * (z[:n] + 1j * z[n:])


def sample_nakagami_vector(m: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Nakagami-m fading with unit mean power.

    The squared amplitude is Gamma(m, 1/m) and the phase is uniform, which
    reduces to CN(0, 1) in distribution for m = 1.
    """
    if not m >= 0.5:
        raise ConfigError(f"Nakagami order must be >= 0.5, got {m!r}")
    if n < 1:
        raise ConfigError(f"vector length must be >= 1, got {n!r}")
    power = rng.gamma(shape=m, scale=1.0 / m, size=n)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.sqrt(power) * np.exp(1j * phase)


def sample_g(params: SystemParams, streams: TrialStreams) -> complex:
    """Only the AS->ER coefficient; same draw as ``sample_channels(...).g``."""
    return complex(sample_nakagami_vector(params.m_g, 1, streams["channel_g"])[0])


def sample_channels(params: SystemParams, streams: TrialStreams) -> ChannelRealization:
    """One quasi-static (g, f, h) draw, constant over the trial."""
    return ChannelRealization(
        g=sample_g(params, streams),
        f=sample_nakagami_vector(params.m_f, params.m, streams["channel_f"]),
        h=sample_nakagami_vector(params.m_h, params.m, streams["channel_h"]),
    )


def sample_ambient(
    params: SystemParams, streams: TrialStreams, ns: int | None = None, ts: float | None = None
) -> AmbientFrame:
    """Draw ``ns`` i.i.d. CN(0, 1) symbols (defaults to ``params.ns``).

    The symbol substream is a fixed sequence, so a longer frame extends a
    shorter one drawn for the same trial.
    """
    ns = params.ns if ns is None else ns
    if ns < 1:
        raise ConfigError(f"ns must be >= 1, got {ns!r}")
    z = streams["symbols"].standard_normal((ns, 2))
    symbols = (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)
    return AmbientFrame(symbols=symbols, ps=params.ps, ts=params.ts if ts is None else ts)


def sample_post_correlator_noise(
    variance_scale: float, m: int, rng: np.random.Generator, zero: bool = False
) -> np.ndarray:
    """CN(0, variance_scale * I_m) vector at the correlator output.

    ``zero=True`` is the noise-free oracle mode and returns an exact zero vector.
    """
    if zero:
        return np.zeros(m, dtype=complex)
    if not variance_scale > 0:
        raise ConfigError(f"noise variance must be > 0, got {variance_scale!r}")
    return sample_complex_gaussian(m, rng, variance_scale)
