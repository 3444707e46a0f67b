"""Law-of-large-numbers closed forms for active and passive RIS energy efficiency.

The active EE depends on (beta, N, Pt, sigma_r^2, sigma_u^2) through eleven
channel/static constants ``A1..A11``. For each swept variable there is a
coefficient family whose builder below is the single place it is defined:

* ``q`` -- EE as a function of the PA factor beta
* ``k`` -- EE as a function of the total power Pt
* ``a`` -- EE as a function of the RIS noise sigma_r^2
* ``d`` -- EE as a function of the user noise sigma_u^2

The amplifier inefficiency ``mu`` enters only the BS share of the
consumption, ``mu * beta * Pt``; with ``mu = 1`` every form reduces to the
textbook expression.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from risee.exact import ACTIVE, PASSIVE, EEResult, energy_efficiency
from risee.params import PathLoss, RayleighParams, SystemConfig

LN2 = math.log(2.0)


@dataclass(frozen=True)
class AsymptoticConstants:
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    a9: float
    a10: float
    a11: float


def constants(pl: PathLoss, rayleigh: RayleighParams, config: SystemConfig) -> AsymptoticConstants:
    af2, ag2, ah2 = rayleigh.alpha_f_sq, rayleigh.alpha_g_sq, rayleigh.alpha_h_sq
    a_fgh = math.sqrt(af2 * ag2 * ah2)
    cascade = math.pi ** 2 / 4.0 * pl.l_g * pl.l_f * af2 * ag2
    cross = math.pi * math.sqrt(math.pi / 2.0) * a_fgh * math.sqrt(pl.l_f * pl.l_g * pl.l_h)
    direct = math.pi / 2.0 * pl.l_h * ah2
    return AsymptoticConstants(
        a1=cascade,
        a2=math.pi * pl.l_g * pl.l_h * ah2 * ag2,
        a3=direct,
        a4=cross,
        a5=2.0 * pl.l_g * ag2,
        a6=2.0 * pl.l_f * af2,
        a7=config.static_bs_w + config.static_ris_other_active_w,
        a8=cascade,
        a9=cross,
        a10=direct,
        a11=config.static_bs_w + config.static_ris_other_passive_w,
    )


# ---------------------------------------------------------------------------
# composition form: gain, SNR, power

def lambda_asymptotic(config: SystemConfig, c: AsymptoticConstants) -> float:
    """Common gain with the channel sum replaced by its expectation."""
    b, pt, n = config.pa_factor, config.total_power_w, config.num_elements
    if n < 1:
        raise ValueError("num_elements must be >= 1")
    if b == 1.0:
        return 0.0
    denom = b * pt * c.a5 * n + n * config.noise_ris_w
    if denom <= 0.0:
        raise ZeroDivisionError("asymptotic gain undefined for beta = 0 and zero RIS noise")
    return math.sqrt((1.0 - b) * pt / denom)


def snr_asymptotic(config: SystemConfig, c: AsymptoticConstants) -> float:
    b, pt, n = config.pa_factor, config.total_power_w, config.num_elements
    if b == 0.0:
        return 0.0
    lam = lambda_asymptotic(config, c)
    signal = c.a1 * n ** 2 * lam ** 2 + c.a3 + c.a4 * n * lam
    noise = c.a6 * n * lam ** 2 * config.noise_ris_w + config.noise_user_w
    return b * pt * signal / noise


def power_asymptotic(config: SystemConfig, c: AsymptoticConstants) -> float:
    b, pt, n = config.pa_factor, config.total_power_w, config.num_elements
    return ((1.0 - b) * pt + config.amp_inefficiency * b * pt - c.a5 * n * b * pt
            - n * config.noise_ris_w + n * config.static_per_element_active_w + c.a7)


def ee_asymptotic_active(config: SystemConfig, c: AsymptoticConstants) -> EEResult:
    power = power_asymptotic(config, c)
    if power <= 0.0:
        raise ValueError(f"nonpositive asymptotic power {power:.6g} W: config is not EE-valid")
    return energy_efficiency(config.bandwidth_hz, snr_asymptotic(config, c), power, ACTIVE)


def _radicand(value, scale=0.0):
    """Clamp a square-root argument that is analytically nonnegative.

    ``scale`` is the magnitude of the summed terms; negatives within
    rounding of it are clamped silently, larger ones with a warning.
    """
    value = np.asarray(value, dtype=float)
    if np.any(value < -1e-12 * np.asarray(scale)):
        warnings.warn("negative square-root argument clamped to 0", RuntimeWarning, stacklevel=3)
    return np.maximum(value, 0.0)


def ee_closed_form(beta, n, pt, sigma_r2, sigma_u2, config: SystemConfig, c: AsymptoticConstants):
    """Single-expression active EE in the five variables (array-friendly).

    Bandwidth, statics and ``mu`` come from ``config``; the five arguments
    override the corresponding config fields.
    """
    beta, n, pt, sr, su = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                                for v in (beta, n, pt, sigma_r2, sigma_u2)))
    terms = (c.a5 * n * beta * pt ** 2 * (1 - beta), n * beta * pt * sr, n * pt * sr)
    root = np.sqrt(_radicand(terms[0] - terms[1] + terms[2], sum(np.abs(t) for t in terms)))
    signal = beta * pt * (c.a1 * n * pt * (1 - beta) + c.a2 * beta * pt + c.a3 * sr + c.a4 * root)
    noise = c.a6 * pt * (1 - beta) * sr + c.a5 * beta * pt * su + sr * su
    power = (-c.a5 * n * beta * pt - n * sr + n * config.static_per_element_active_w + pt + c.a7
             + (config.amp_inefficiency - 1.0) * beta * pt)
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(signal == 0.0, 0.0, signal / noise)
        out = config.bandwidth_hz * np.log2(1.0 + snr) / np.where(power > 0, power, np.nan)
    return float(out) if out.ndim == 0 else out


def ee_of_config(config: SystemConfig, c: AsymptoticConstants) -> float:
    return ee_closed_form(config.pa_factor, config.num_elements, config.total_power_w,
                          config.noise_ris_w, config.noise_user_w, config, c)


# ---------------------------------------------------------------------------
# single-variable forms

class BetaCoeffs(NamedTuple):
    """EE(beta) = B log2(1 + (q1 b^2 + q2 b + q3 b sqrt(q4 b^2 + q5 b + q6)) / (q7 b + q8)) / (q10 b + q9).

    ``q4`` is the quadratic coefficient of the radicand and ``q10`` the
    slope of the consumption; they are different quantities.
    """
    q1: float
    q2: float
    q3: float
    q4: float
    q5: float
    q6: float
    q7: float
    q8: float
    q9: float
    q10: float
    bandwidth: float


def beta_coeffs(config: SystemConfig, c: AsymptoticConstants) -> BetaCoeffs:
    n, pt = config.num_elements, config.total_power_w
    sr, su = config.noise_ris_w, config.noise_user_w
    return BetaCoeffs(
        q1=-c.a1 * n * pt ** 2 + c.a2 * pt ** 2,
        q2=c.a1 * n * pt ** 2 + c.a3 * pt * sr,
        q3=c.a4 * pt,
        q4=-c.a5 * n * pt ** 2,
        q5=c.a5 * n * pt ** 2 - n * pt * sr,
        q6=n * pt * sr,
        q7=c.a5 * pt * su - c.a6 * pt * sr,
        q8=c.a6 * pt * sr + sr * su,
        q9=-n * sr + n * config.static_per_element_active_w + pt + c.a7,
        q10=-c.a5 * n * pt + (config.amp_inefficiency - 1.0) * pt,
        bandwidth=config.bandwidth_hz,
    )


def ee_of_beta(beta, q: BetaCoeffs):
    b = np.asarray(beta, dtype=float)
    terms = (q.q4 * b ** 2, q.q5 * b, q.q6)
    root = np.sqrt(_radicand(sum(terms), sum(np.abs(t) for t in terms)))
    num = q.q1 * b ** 2 + q.q2 * b + q.q3 * b * root
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(num == 0.0, 0.0, num / (q.q7 * b + q.q8))
    out = q.bandwidth * np.log2(1.0 + snr) / (q.q10 * b + q.q9)
    return float(out) if out.ndim == 0 else out


class PtCoeffs(NamedTuple):
    """EE(Pt) = B log2(1 + (k1 P^2 + k2 P + k3 P sqrt(k4 P^2 + k5 P)) / (k6 P + k7)) / (k8 P + k9)."""
    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    k6: float
    k7: float
    k8: float
    k9: float
    bandwidth: float


def pt_coeffs(config: SystemConfig, c: AsymptoticConstants) -> PtCoeffs:
    n, b = config.num_elements, config.pa_factor
    sr, su = config.noise_ris_w, config.noise_user_w
    return PtCoeffs(
        k1=c.a1 * n * b * (1 - b) + c.a2 * b ** 2,
        k2=c.a3 * b * sr,
        k3=c.a4 * b,
        k4=c.a5 * n * b * (1 - b),
        k5=-n * b * sr + n * sr,
        k6=c.a6 * (1 - b) * sr + c.a5 * b * su,
        k7=sr * su,
        k8=-c.a5 * n * b + 1.0 + (config.amp_inefficiency - 1.0) * b,
        k9=-n * sr + n * config.static_per_element_active_w + c.a7,
        bandwidth=config.bandwidth_hz,
    )


def ee_of_pt(pt, k: PtCoeffs):
    p = np.asarray(pt, dtype=float)
    terms = (k.k4 * p ** 2, k.k5 * p)
    num = (k.k1 * p ** 2 + k.k2 * p
           + k.k3 * p * np.sqrt(_radicand(sum(terms), sum(np.abs(t) for t in terms))))
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(num == 0.0, 0.0, num / (k.k6 * p + k.k7))
    out = k.bandwidth * np.log2(1.0 + snr) / (k.k8 * p + k.k9)
    return float(out) if out.ndim == 0 else out


class SigmaRCoeffs(NamedTuple):
    """EE(s) = B log2(1 + (a1 s + a2 sqrt(a3 s + a4) + a5) / (a6 s + a7)) / (-N s + a8), s = sigma_r^2."""
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    n: int
    bandwidth: float


def sigma_r_coeffs(config: SystemConfig, c: AsymptoticConstants) -> SigmaRCoeffs:
    n, b, pt = config.num_elements, config.pa_factor, config.total_power_w
    su = config.noise_user_w
    return SigmaRCoeffs(
        a1=c.a3 * b * pt,
        a2=c.a4 * b * pt,
        a3=-n * b * pt + n * pt,
        a4=c.a5 * n * b * pt ** 2 * (1 - b),
        a5=c.a1 * n * b * pt ** 2 * (1 - b) + c.a2 * b ** 2 * pt ** 2,
        a6=c.a6 * pt * (1 - b) + su,
        a7=c.a5 * b * pt * su,
        a8=(-c.a5 * n * b * pt + n * config.static_per_element_active_w + pt + c.a7
            + (config.amp_inefficiency - 1.0) * b * pt),
        n=n,
        bandwidth=config.bandwidth_hz,
    )


def ee_of_sigma_r(sigma_r2, a: SigmaRCoeffs):
    s = np.asarray(sigma_r2, dtype=float)
    if np.any(s < 0):
        raise ValueError("sigma_r^2 must be nonnegative")
    num = a.a1 * s + a.a2 * np.sqrt(_radicand(a.a3 * s + a.a4, np.abs(a.a3 * s) + abs(a.a4))) + a.a5
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(num == 0.0, 0.0, num / (a.a6 * s + a.a7))
    out = a.bandwidth * np.log2(1.0 + snr) / (-a.n * s + a.a8)
    return float(out) if out.ndim == 0 else out


class SigmaUCoeffs(NamedTuple):
    """EE(s) = (B / d1) log2(1 + d2 / (d3 s + d4)), s = sigma_u^2."""
    d1: float
    d2: float
    d3: float
    d4: float
    bandwidth: float


def sigma_u_coeffs(config: SystemConfig, c: AsymptoticConstants) -> SigmaUCoeffs:
    n, b, pt = config.num_elements, config.pa_factor, config.total_power_w
    sr = config.noise_ris_w
    terms = (c.a5 * n * b * pt ** 2 * (1 - b), n * b * pt * sr, n * pt * sr)
    root = math.sqrt(float(_radicand(terms[0] - terms[1] + terms[2], sum(abs(t) for t in terms))))
    return SigmaUCoeffs(
        d1=(-c.a5 * n * b * pt - n * sr + n * config.static_per_element_active_w + pt + c.a7
            + (config.amp_inefficiency - 1.0) * b * pt),
        d2=b * pt * (c.a1 * n * pt * (1 - b) + c.a2 * b * pt + c.a3 * sr + c.a4 * root),
        d3=c.a5 * b * pt + sr,
        d4=c.a6 * pt * (1 - b) * sr,
        bandwidth=config.bandwidth_hz,
    )


def ee_of_sigma_u(sigma_u2, d: SigmaUCoeffs):
    s = np.asarray(sigma_u2, dtype=float)
    if np.any(s < 0):
        raise ValueError("sigma_u^2 must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(d.d2 == 0.0, 0.0, d.d2 / (d.d3 * s + d.d4))
    out = d.bandwidth / d.d1 * np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# limits

@dataclass(frozen=True)
class PtAsymptote:
    """High-power behaviour: EE ~ B log2(1 + slope * Pt) / (k8 * Pt) -> 0."""

    slope: float
    k8: float
    bandwidth: float
    limit: float = 0.0

    def value(self, pt):
        p = np.asarray(pt, dtype=float)
        out = self.bandwidth * np.log2(1.0 + self.slope * p) / (self.k8 * p)
        return float(out) if out.ndim == 0 else out


def limit_pt_infinity(config: SystemConfig, c: AsymptoticConstants) -> PtAsymptote:
    k = pt_coeffs(config, c)
    if k.k6 <= 0.0:
        raise ValueError("high-power asymptote needs nonzero noise")
    return PtAsymptote(slope=(k.k1 + k.k3 * math.sqrt(k.k4)) / k.k6, k8=k.k8,
                       bandwidth=config.bandwidth_hz)


def limit_sigma_r_zero(config: SystemConfig, c: AsymptoticConstants) -> float:
    """EE as the RIS noise vanishes (finite when beta > 0 and sigma_u^2 > 0)."""
    a = sigma_r_coeffs(config, c)
    if a.a7 <= 0.0:
        raise ValueError("limit is unbounded: needs pa_factor > 0 and noise_user_w > 0")
    return a.bandwidth * math.log2(1.0 + (a.a2 * math.sqrt(a.a4) + a.a5) / a.a7) / a.a8


def limit_sigma_u_zero(config: SystemConfig, c: AsymptoticConstants) -> float:
    """EE as the user noise vanishes (finite when beta < 1 and sigma_r^2 > 0)."""
    d = sigma_u_coeffs(config, c)
    if d.d4 <= 0.0:
        raise ValueError("limit is unbounded: needs pa_factor < 1 and noise_ris_w > 0")
    return d.bandwidth / d.d1 * math.log2(1.0 + d.d2 / d.d4)


# ---------------------------------------------------------------------------
# passive

def snr_passive_asymptotic(config: SystemConfig, c: AsymptoticConstants) -> float:
    if config.noise_user_w <= 0.0:
        raise ZeroDivisionError("passive SNR needs noise_user_w > 0")
    n = config.num_elements
    return config.total_power_w * (c.a8 * n ** 2 + c.a9 * n + c.a10) / config.noise_user_w


def ee_asymptotic_passive(config: SystemConfig, c: AsymptoticConstants) -> EEResult:
    power = (config.amp_inefficiency * config.total_power_w
             + config.num_elements * config.static_per_element_passive_w + c.a11)
    return energy_efficiency(config.bandwidth_hz, snr_passive_asymptotic(config, c), power, PASSIVE)
