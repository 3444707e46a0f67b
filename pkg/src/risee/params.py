"""System parameters, unit conversion, geometry and path loss.

Every power in the numerical core is in watts. Config files may give powers
in dBm (``*_dbm`` keys) or watts (``*_w`` keys); conversion happens once, here.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from risee.asymptotic import AsymptoticConstants


class ConfigError(ValueError):
    """Raised for malformed or out-of-domain configuration."""


def dbm_to_watts(p_dbm):
    """Convert dBm to watts. Works on scalars and arrays."""
    if np.ndim(p_dbm):
        return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)
    return 10.0 ** ((float(p_dbm) - 30.0) / 10.0)


def watts_to_dbm(p_w):
    """Convert watts to dBm; zero or negative power has no dBm value."""
    p = np.asarray(p_w, dtype=float)
    if np.any(p <= 0.0):
        raise ValueError("watts_to_dbm needs strictly positive power")
    out = 10.0 * np.log10(p) + 30.0
    return float(out) if out.ndim == 0 else out


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters (powers and noise variances in watts).

    ``tx_symbol_power`` is fixed at 1; it is kept as a field so that output
    metadata states the convention explicitly.
    """

    bandwidth_hz: float = 10e6
    total_power_w: float = 1.0
    pa_factor: float = 0.5
    num_elements: int = 1024
    noise_ris_w: float = 1e-10
    noise_user_w: float = 1e-10
    amp_inefficiency: float = 1.0
    static_bs_w: float = 1e-2
    static_per_element_active_w: float = 10.0 ** (3.0 / 10.0) * 1e-3
    static_ris_other_active_w: float = 1e-2
    static_per_element_passive_w: float = 1e-4
    static_ris_other_passive_w: float = 1e-2
    tx_symbol_power: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ConfigError("bandwidth_hz must be positive")
        if self.total_power_w < 0:
            raise ConfigError("total_power_w must be nonnegative")
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ConfigError("num_elements must be a positive integer")
        for name in ("noise_ris_w", "noise_user_w", "static_bs_w",
                     "static_per_element_active_w", "static_ris_other_active_w",
                     "static_per_element_passive_w", "static_ris_other_passive_w"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        # pa_factor and amp_inefficiency are checked by validate(), so that
        # sweeps can build out-of-range configs and get a report instead.

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @property
    def static_active_w(self) -> float:
        """P_c = P_0 + N P_cn + P_0,RIS."""
        return (self.static_bs_w + self.num_elements * self.static_per_element_active_w
                + self.static_ris_other_active_w)

    @property
    def static_passive_w(self) -> float:
        return (self.static_bs_w + self.num_elements * self.static_per_element_passive_w
                + self.static_ris_other_passive_w)


@dataclass(frozen=True)
class LinkGeometry:
    bs_pos: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ris_pos: tuple[float, float, float] = (150.0, 0.0, 0.0)
    user_pos: tuple[float, float, float] = (100.0, 33.0, 0.0)
    ref_loss_db: float = -30.0
    ref_distance_m: float = 1.0
    exponent_bs_ris: float = 2.3
    exponent_ris_user: float = 2.3
    exponent_bs_user: float = 3.8

    def __post_init__(self):
        for name in ("bs_pos", "ris_pos", "user_pos"):
            pos = tuple(float(v) for v in getattr(self, name))
            if len(pos) != 3:
                raise ConfigError(f"{name} must have three coordinates")
            object.__setattr__(self, name, pos)
        if self.ref_distance_m <= 0:
            raise ConfigError("ref_distance_m must be positive")
        for name in ("exponent_bs_ris", "exponent_ris_user", "exponent_bs_user"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def distances(self) -> tuple[float, float, float]:
        """Euclidean distances (BS-RIS, RIS-user, BS-user) in meters."""
        bs, ris, ue = (np.array(p, dtype=float) for p in (self.bs_pos, self.ris_pos, self.user_pos))
        return (float(np.linalg.norm(ris - bs)), float(np.linalg.norm(ue - ris)),
                float(np.linalg.norm(ue - bs)))


@dataclass(frozen=True)
class PathLoss:
    l_g: float
    l_f: float
    l_h: float


@dataclass(frozen=True)
class RayleighParams:
    alpha_f_sq: float = 0.5
    alpha_g_sq: float = 0.5
    alpha_h_sq: float = 0.5

    def __post_init__(self):
        for name in ("alpha_f_sq", "alpha_g_sq", "alpha_h_sq"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")


def path_loss_db(distance_m, ref_loss_db: float, ref_distance_m: float, exponent: float):
    """L(d) = PL0 - 10 a log10(d / d0), in dB."""
    return ref_loss_db - 10.0 * exponent * np.log10(np.asarray(distance_m) / ref_distance_m)


def path_loss(geometry: LinkGeometry) -> PathLoss:
    d_g, d_f, d_h = geometry.distances()
    if min(d_g, d_f, d_h) <= 0.0:
        raise ConfigError("BS, RIS and user positions must be pairwise distinct")
    coeffs = [
        float(db_to_linear(path_loss_db(d, geometry.ref_loss_db, geometry.ref_distance_m, a)))
        for d, a in ((d_g, geometry.exponent_bs_ris), (d_f, geometry.exponent_ris_user),
                     (d_h, geometry.exponent_bs_user))
    ]
    return PathLoss(*coeffs)


def active_power_denominator(config: SystemConfig, constants: "AsymptoticConstants") -> float:
    """Asymptotic active consumption -A5 N beta Pt - N sr + N Pcn + Pt + A7 (+ (mu-1) beta Pt)."""
    n, b, pt = config.num_elements, config.pa_factor, config.total_power_w
    return (-constants.a5 * n * b * pt - n * config.noise_ris_w
            + n * config.static_per_element_active_w + pt + constants.a7
            + (config.amp_inefficiency - 1.0) * b * pt)


def validate(config: SystemConfig, constants: "AsymptoticConstants") -> list[str]:
    """Return the list of violated invariants; an empty list means EE-valid."""
    problems = []
    if not 0.0 <= config.pa_factor <= 1.0:
        problems.append(f"pa_factor out of range [0, 1]: {config.pa_factor}")
    if config.amp_inefficiency < 1.0:
        problems.append(f"amp_inefficiency must be >= 1: {config.amp_inefficiency}")
    if config.noise_user_w <= 0.0 and config.noise_ris_w <= 0.0:
        problems.append("noise_ris_w and noise_user_w are both zero: SNR unbounded")
    denom = active_power_denominator(config, constants)
    if not denom > 0.0:
        problems.append(f"nonpositive power denominator: {denom:.6g} W")
    return problems


# ---------------------------------------------------------------------------
# config files

@dataclass(frozen=True)
class AnnealingSchedule:
    t0: float = 1.0
    cooling: float = 0.95
    proposals_per_temp: int = 20
    step: float = 1.0
    t_min: float = 1e-9

    def __post_init__(self):
        if not self.t0 > 0:
            raise ConfigError("annealing t0 must be positive")
        if not 0.0 < self.cooling < 1.0:
            raise ConfigError("annealing cooling must lie in (0, 1)")
        if self.proposals_per_temp < 1:
            raise ConfigError("annealing proposals_per_temp must be >= 1")
        if not 0 < self.t_min < self.t0:
            raise ConfigError("annealing t_min must lie in (0, t0)")


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs: system, geometry, fading, solver schedule."""

    system: SystemConfig = SystemConfig()
    geometry: LinkGeometry = LinkGeometry()
    rayleigh: RayleighParams = RayleighParams()
    annealing: AnnealingSchedule = AnnealingSchedule()

    def with_system(self, **changes) -> "Scenario":
        return dataclasses.replace(self, system=self.system.replace(**changes))

    def as_dict(self) -> dict:
        return {
            "system": dataclasses.asdict(self.system),
            "geometry": dataclasses.asdict(self.geometry),
            "rayleigh": dataclasses.asdict(self.rayleigh),
            "annealing": dataclasses.asdict(self.annealing),
        }


_SYSTEM_POWER_KEYS = {
    "total_power", "noise_ris", "noise_user", "static_bs",
    "static_per_element_active", "static_ris_other_active",
    "static_per_element_passive", "static_ris_other_passive",
}
_GEOMETRY_VECTOR_KEYS = {"bs_pos", "ris_pos", "user_pos"}
_GEOMETRY_SCALAR_KEYS = {"ref_loss_db", "ref_distance_m", "exponent_bs_ris",
                         "exponent_ris_user", "exponent_bs_user"}
_RAYLEIGH_KEYS = {"alpha_f_sq", "alpha_g_sq", "alpha_h_sq"}
_ANNEALING_KEYS = {"sa_t0": "t0", "sa_cooling": "cooling",
                   "sa_proposals_per_temp": "proposals_per_temp",
                   "sa_step": "step", "sa_t_min": "t_min"}


def parse_config_text(text: str, base: Scenario | None = None) -> Scenario:
    """Parse flat ``key = value`` lines on top of ``base`` (defaults if None).

    Blank lines and ``#`` comments are ignored. Vector keys take three
    comma-separated numbers.
    """
    base = base or Scenario()
    system, geometry = {}, {}
    rayleigh, annealing = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _GEOMETRY_VECTOR_KEYS:
                geometry[key] = tuple(float(v) for v in value.split(","))
            elif key in _GEOMETRY_SCALAR_KEYS:
                geometry[key] = float(value)
            elif key in _RAYLEIGH_KEYS:
                rayleigh[key] = float(value)
            elif key in _ANNEALING_KEYS:
                name = _ANNEALING_KEYS[key]
                annealing[name] = int(value) if name == "proposals_per_temp" else float(value)
            elif key == "bandwidth_hz":
                system[key] = float(value)
            elif key == "pa_factor":
                system[key] = float(value)
            elif key == "amp_inefficiency":
                system[key] = float(value)
            elif key == "num_elements":
                system[key] = int(value)
            elif key.endswith("_dbm") and key[:-4] in _SYSTEM_POWER_KEYS:
                system[key[:-4] + "_w"] = float(dbm_to_watts(float(value)))
            elif key.endswith("_w") and key[:-2] in _SYSTEM_POWER_KEYS:
                system[key] = float(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return Scenario(
        system=dataclasses.replace(base.system, **system),
        geometry=dataclasses.replace(base.geometry, **geometry),
        rayleigh=dataclasses.replace(base.rayleigh, **rayleigh),
        annealing=dataclasses.replace(base.annealing, **annealing),
    )


def load_config(path: str | Path | None = None) -> Scenario:
    """Load a scenario; ``None`` loads the bundled default file."""
    if path is None:
        text = resources.files("risee").joinpath("default.cfg").read_text()
    else:
        text = Path(path).read_text()
    return parse_config_text(text)


def default_scenario() -> Scenario:
    return load_config(None)
