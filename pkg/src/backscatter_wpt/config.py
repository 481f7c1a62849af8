"""System parameters, harvester model and derived large-scale quantities.

Config files are flat ``key = value`` text with ``#`` comments, SI base units
(seconds, meters, watts). Keys are the lower_snake_case field names of
:class:`SystemParams` and :class:`HarvesterModel`; unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

# Path-loss exponent is never stated numerically; this value is calibrated so
# that the balanced-training average harvested power at Ts = 5 us is ~50 uW
# (see scripts/calibrate_alpha.py).
CALIBRATED_ALPHA = 2.52

TIMING_RTOL = 1e-9


class ConfigError(ValueError):
    """Raised for unparseable config text or a violated parameter invariant."""


@dataclass(frozen=True)
class SystemParams:
    """Deterministic scalars of the link.

    Attributes:
        d1, d2, d3: AS->ER, ER->ET and AS->ET distances [m].
        d0: reference distance [m].
        k0: attenuation at the reference distance.
        alpha: path-loss exponent.
        ps, pt: ambient source and energy transmitter powers [W].
        sigma_n2: receiver noise power [W].
        sigma_i2: aggregate neighbouring-source interference power [W].
        ts: ambient symbol duration [s].
        tc: chip duration [s].
        ns: ambient symbols in the backscatter phase.
        nc: chips in the backscatter phase.
        m: antennas at the energy transmitter.
        m_g, m_h, m_f: Nakagami orders of the AS->ER, AS->ET, ER->ET links.
        t_off: correlator timing offset [s].
    """

    ns: int
    nc: int
    d1: float = 200.0
    d2: float = 10.0
    d3: float = 200.0
    d0: float = 1.0
    k0: float = 1e-3
    alpha: float = CALIBRATED_ALPHA
    ps: float = 1.0
    pt: float = 1.0
    sigma_n2: float = 1e-18
    sigma_i2: float = 0.0
    ts: float = 5e-6
    tc: float = 500e-9
    m: int = 500
    m_g: float = 1.0
    m_h: float = 1.0
    m_f: float = 10.0
    t_off: float = 0.0

    def __post_init__(self):
        for name in ("d1", "d2", "d3", "d0", "k0", "ps", "pt", "sigma_n2", "ts", "tc"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if not math.isfinite(self.alpha):
            raise ConfigError(f"alpha must be finite, got {self.alpha!r}")
        if not (self.sigma_i2 >= 0):
            raise ConfigError(f"sigma_i2 must be >= 0, got {self.sigma_i2!r}")
        if not (self.t_off >= 0):
            raise ConfigError(f"t_off must be >= 0, got {self.t_off!r}")
        for name in ("ns", "nc", "m"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("m_g", "m_h", "m_f"):
            if not (getattr(self, name) >= 0.5):
                raise ConfigError(f"{name} must be >= 0.5, got {getattr(self, name)!r}")
        tb_sym = self.ns * self.ts
        tb_chip = self.nc * self.tc
        if abs(tb_sym - tb_chip) > TIMING_RTOL * max(tb_sym, tb_chip):
            raise ConfigError(
                f"timing inconsistency: ns*ts = {tb_sym!r} s but nc*tc = {tb_chip!r} s"
            )

    def replace(self, **changes) -> "SystemParams":
        return SystemParams(**{**asdict(self), **changes})


@dataclass(frozen=True)
class HarvesterModel:
    """Logistic rectifier model: ``a0`` [1/W] slope, ``b0`` [W] turn-on, ``c0`` [W] saturation."""

    a0: float = 1500.0
    b0: float = 0.0022
    c0: float = 0.024

    def __post_init__(self):
        for name in ("a0", "b0", "c0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class DerivedParams:
    gamma1: float
    gamma2: float
    gamma3: float
    tb: float
    chips_per_symbol: Fraction


def path_loss(d: float, k0: float, d0: float, alpha: float) -> float:
    """Large-scale attenuation ``k0 * (d / d0) ** -alpha``."""
    for name, value in (("d", d), ("k0", k0), ("d0", d0)):
        if not value > 0:
            raise ConfigError(f"path_loss: {name} must be > 0, got {value!r}")
    return k0 * (d / d0) ** (-alpha)


def derive(params: SystemParams) -> DerivedParams:
    pl = lambda d: path_loss(d, params.k0, params.d0, params.alpha)  # noqa: E731
    return DerivedParams(
        gamma1=pl(params.d1),
        gamma2=pl(params.d2),
        gamma3=pl(params.d3),
        tb=params.ns * params.ts,
        chips_per_symbol=Fraction(params.nc, params.ns),
    )


def sigma_i2_from_ratio_db(params: SystemParams, ratio_db: float, reference: str = "backscatter") -> float:
    """Interference power for a given signal-to-interference ratio in dB.

    ``reference="backscatter"`` measures the ratio against the average received
    backscatter-link power ``ps * gamma1 * gamma2``; ``"direct"`` uses the
    direct-link power ``ps * gamma3``. An infinite ratio means no interference.
    """
    if math.isinf(ratio_db) and ratio_db > 0:
        return 0.0
    d = derive(params)
    if reference == "backscatter":
        p_ref = params.ps * d.gamma1 * d.gamma2
    elif reference == "direct":
        p_ref = params.ps * d.gamma3
    else:
        raise ConfigError(f"unknown interference reference {reference!r}")
    return p_ref / 10.0 ** (ratio_db / 10.0)


_PARAM_FIELDS = {f.name: f for f in fields(SystemParams)}
_HARV_FIELDS = {f.name: f for f in fields(HarvesterModel)}
_INT_KEYS = {"ns", "nc", "m"}
_EXTRA_KEYS = {"interference_ratio_db", "interference_reference"}


def _parse_number(key: str, text: str):
    try:
        if key in _INT_KEYS:
            value = float(text)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def parse_config(text: str) -> tuple[SystemParams, HarvesterModel]:
    """Parse config text into validated parameter objects."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARAM_FIELDS and key not in _HARV_FIELDS and key not in _EXTRA_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value

    missing = [k for k in ("ns", "nc") if k not in entries]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    p_kwargs = {k: _parse_number(k, v) for k, v in entries.items() if k in _PARAM_FIELDS}
    h_kwargs = {k: _parse_number(k, v) for k, v in entries.items() if k in _HARV_FIELDS}
    params = SystemParams(**p_kwargs)
    harvester = HarvesterModel(**h_kwargs)

    if "interference_ratio_db" in entries:
        if "sigma_i2" in entries:
            raise ConfigError("give either sigma_i2 or interference_ratio_db, not both")
        db = _parse_number("interference_ratio_db", entries["interference_ratio_db"])
        ref = entries.get("interference_reference", "backscatter")
        params = params.replace(sigma_i2=sigma_i2_from_ratio_db(params, db, ref))
    elif "interference_reference" in entries:
        raise ConfigError("interference_reference requires interference_ratio_db")
    return params, harvester


def load_config(source: str | Path) -> tuple[SystemParams, HarvesterModel]:
    """Load a config file from disk."""
    return parse_config(Path(source).read_text())


def format_config(params: SystemParams, harvester: HarvesterModel) -> str:
    """Serialize parameters back into config text (``repr`` keeps floats exact)."""
    lines = [f"{k} = {v!r}" for k, v in asdict(params).items()]
    lines += [f"{k} = {v!r}" for k, v in asdict(harvester).items()]
    return "\n".join(lines) + "\n"
