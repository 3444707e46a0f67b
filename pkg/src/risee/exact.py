"""Per-realization SNR, power consumption and EE, plus Monte Carlo averaging."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from risee.channel import ChannelRealization, sample_from, trial_rng
from risee.params import LinkGeometry, PathLoss, RayleighParams, SystemConfig, path_loss

ACTIVE = "active"
PASSIVE = "passive"


class MonteCarloError(RuntimeError):
    def __init__(self, trial: int, reason: str):
        super().__init__(f"trial {trial}: {reason}")
        self.trial = trial


@dataclass(frozen=True)
class EEResult:
    snr: float
    power_total_w: float
    ee_bits_per_joule: float
    mode: str

    @property
    def valid(self) -> bool:
        return self.power_total_w > 0.0 and math.isfinite(self.ee_bits_per_joule)


def energy_efficiency(bandwidth_hz: float, snr: float, power_w: float, mode: str) -> EEResult:
    """B log2(1 + snr) / P; nonpositive power gives an invalid (NaN) result."""
    ee = bandwidth_hz * math.log2(1.0 + snr) / power_w if power_w > 0.0 else math.nan
    return EEResult(snr=snr, power_total_w=power_w, ee_bits_per_joule=ee, mode=mode)


def amplification_gain(realization: ChannelRealization, config: SystemConfig, pl: PathLoss) -> float:
    """Common amplitude gain |p(n)| that spends exactly (1 - beta) Pt on reflection."""
    b, pt = config.pa_factor, config.total_power_w
    denom = (b * pt * pl.l_g * float(np.sum(realization.g_mag ** 2))
             + realization.num_elements * config.noise_ris_w)
    if denom <= 0.0:
        raise ZeroDivisionError("amplification gain undefined: no incident power and no RIS noise")
    return math.sqrt((1.0 - b) * pt / denom)


def exact_snr_active(realization: ChannelRealization, config: SystemConfig, pl: PathLoss,
                     gain: float | None = None) -> float:
    if gain is None:
        gain = amplification_gain(realization, config, pl)
    f, g = realization.f_mag, realization.g_mag
    amplitude = (math.sqrt(pl.l_f * pl.l_g) * gain * float(np.sum(f * g))
                 + math.sqrt(pl.l_h) * realization.h_mag)
    # cross terms vanish because RIS noise is white across elements
    noise = pl.l_f * config.noise_ris_w * gain ** 2 * float(np.sum(f ** 2)) + config.noise_user_w
    if noise <= 0.0:
        raise ZeroDivisionError("zero total noise at the user")
    return config.pa_factor * config.total_power_w * amplitude ** 2 / noise


@dataclass(frozen=True)
class ActivePowerBreakdown:
    p_in: float
    p_out: float
    p_out_elementwise: float
    p_static: float
    p_total: float


def exact_power_active(realization: ChannelRealization, config: SystemConfig, pl: PathLoss,
                       gain: float | None = None) -> ActivePowerBreakdown:
    """Total consumption P_out - P_in + mu beta Pt + P_c, with the audit terms."""
    if gain is None:
        gain = amplification_gain(realization, config, pl)
    b, pt, n = config.pa_factor, config.total_power_w, realization.num_elements
    sum_g2 = float(np.sum(realization.g_mag ** 2))
    p_in = b * pt * pl.l_g * sum_g2 + n * config.noise_ris_w
    p_out = (1.0 - b) * pt
    p_out_elementwise = float(np.sum(
        b * pt * pl.l_g * gain ** 2 * realization.g_mag ** 2 + config.noise_ris_w * gain ** 2))
    p_static = config.static_active_w
    total = p_out - p_in + config.amp_inefficiency * b * pt + p_static
    return ActivePowerBreakdown(p_in, p_out, p_out_elementwise, p_static, total)


def exact_power_total_active(realization, config, pl, gain=None) -> float:
    return exact_power_active(realization, config, pl, gain).p_total


def exact_ee_active(realization: ChannelRealization, config: SystemConfig, pl: PathLoss) -> EEResult:
    gain = amplification_gain(realization, config, pl)
    snr = exact_snr_active(realization, config, pl, gain)
    power = exact_power_total_active(realization, config, pl, gain)
    return energy_efficiency(config.bandwidth_hz, snr, power, ACTIVE)


def exact_snr_passive(realization: ChannelRealization, config: SystemConfig, pl: PathLoss) -> float:
    if config.noise_user_w <= 0.0:
        raise ZeroDivisionError("passive SNR needs noise_user_w > 0")
    amplitude = (math.sqrt(pl.l_f * pl.l_g) * float(np.sum(realization.f_mag * realization.g_mag))
                 + math.sqrt(pl.l_h) * realization.h_mag)
    return config.total_power_w * amplitude ** 2 / config.noise_user_w


def exact_power_total_passive(config: SystemConfig) -> float:
    return config.amp_inefficiency * config.total_power_w + config.static_passive_w


def exact_ee_passive(realization: ChannelRealization, config: SystemConfig, pl: PathLoss) -> EEResult:
    snr = exact_snr_passive(realization, config, pl)
    return energy_efficiency(config.bandwidth_hz, snr, exact_power_total_passive(config), PASSIVE)


def exact_ee(realization, config, pl, mode: str) -> EEResult:
    if mode == ACTIVE:
        return exact_ee_active(realization, config, pl)
    if mode == PASSIVE:
        return exact_ee_passive(realization, config, pl)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Monte Carlo

@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    mean_ee: float
    std_err_ee: float
    mean_snr: float
    mean_power: float
    seed: int
    mode: str


def _run_trials(args) -> np.ndarray:
    config, pl, rayleigh, mode, seed, start, stop = args
    out = np.empty((stop - start, 3))
    for k, i in enumerate(range(start, stop)):
        real = sample_from(trial_rng(seed, i), rayleigh, config.num_elements)
        try:
            res = exact_ee(real, config, pl, mode)
        except (ZeroDivisionError, ValueError) as exc:
            raise MonteCarloError(i, str(exc)) from exc
        if not res.valid:
            raise MonteCarloError(i, f"nonpositive total power {res.power_total_w:.6g} W")
        out[k] = (res.ee_bits_per_joule, res.snr, res.power_total_w)
    return out


def trial_values(config: SystemConfig, pl: PathLoss, rayleigh: RayleighParams, mode: str,
                 trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Per-trial (ee, snr, power) rows in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers <= 1:
        return _run_trials((config, pl, rayleigh, mode, seed, 0, trials))
    edges = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [(config, pl, rayleigh, mode, seed, int(a), int(b))
            for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_trials, jobs))
    return np.concatenate(parts)


def monte_carlo(config: SystemConfig, geometry: LinkGeometry | PathLoss, rayleigh: RayleighParams,
                mode: str, trials: int = 10_000, seed: int = 0, workers: int = 1) -> MonteCarloSummary:
    """Average the exact EE over ``trials`` independent channel draws.

    The reduction always runs over the full, trial-ordered array, so the
    result is bit-identical for any ``workers``.
    """
    pl = geometry if isinstance(geometry, PathLoss) else path_loss(geometry)
    vals = trial_values(config, pl, rayleigh, mode, trials, seed, workers)
    ee = vals[:, 0]
    stderr = float(np.std(ee, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloSummary(trials=trials, mean_ee=float(np.mean(ee)), std_err_ee=stderr,
                             mean_snr=float(np.mean(vals[:, 1])),
                             mean_power=float(np.mean(vals[:, 2])), seed=seed, mode=mode)
