"""Rayleigh channel sampling and the analytic moments used by the asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risee.params import RayleighParams


@dataclass(frozen=True)
class ChannelRealization:
    """One Monte Carlo draw of the channel magnitudes.

    Phases are cycles in [0, 1) (so the physical angle of ``g(n)`` is
    ``2*pi*phase_g[n]``), except ``phase_h`` which is already in radians,
    mirroring how the direct-path phase enters the received signal.
    """

    g_mag: np.ndarray
    f_mag: np.ndarray
    h_mag: float
    phase_g: np.ndarray | None = None
    phase_f: np.ndarray | None = None
    phase_h: float | None = None

    def __post_init__(self):
        if self.g_mag.shape != self.f_mag.shape or self.g_mag.ndim != 1:
            raise ValueError("g_mag and f_mag must be 1-D arrays of equal length")
        if np.any(self.g_mag < 0) or np.any(self.f_mag < 0) or self.h_mag < 0:
            raise ValueError("channel magnitudes must be nonnegative")

    @property
    def num_elements(self) -> int:
        return self.g_mag.shape[0]

    @property
    def has_phases(self) -> bool:
        return self.phase_g is not None and self.phase_f is not None and self.phase_h is not None


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for draw ``index`` of the stream ``seed``.

    Counter-based: the stream of draw ``i`` depends only on ``(seed, i)``, so
    results do not depend on how trials are split across workers.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def rayleigh_inverse_cdf(u, alpha_sq: float):
    """x = alpha sqrt(-2 ln(1 - u)) for u in [0, 1)."""
    return math.sqrt(alpha_sq) * np.sqrt(-2.0 * np.log1p(-np.asarray(u)))


def sample_from(rng: np.random.Generator, params: RayleighParams, n: int,
                with_phases: bool = False) -> ChannelRealization:
    if n < 1:
        raise ValueError("need at least one RIS element")
    u = rng.random(2 * n + 1)
    g = rayleigh_inverse_cdf(u[:n], params.alpha_g_sq)
    f = rayleigh_inverse_cdf(u[n:2 * n], params.alpha_f_sq)
    h = float(rayleigh_inverse_cdf(u[2 * n], params.alpha_h_sq))
    if not with_phases:
        return ChannelRealization(g, f, h)
    ph = rng.random(2 * n + 1)
    return ChannelRealization(g, f, h, phase_g=ph[:n], phase_f=ph[n:2 * n],
                              phase_h=float(2.0 * math.pi * ph[2 * n]))


def sample(params: RayleighParams, n: int, seed: int, with_phases: bool = False,
           index: int = 0) -> ChannelRealization:
    """Draw i.i.d. Rayleigh magnitudes for all three links."""
    return sample_from(trial_rng(seed, index), params, n, with_phases)


@dataclass(frozen=True)
class RayleighMoments:
    mean_f: float
    mean_g: float
    mean_sq_f: float
    mean_sq_g: float
    mean_h: float


def rayleigh_mean(alpha_sq: float) -> float:
    return math.sqrt(math.pi / 2.0) * math.sqrt(alpha_sq)


def moments(params: RayleighParams) -> RayleighMoments:
    return RayleighMoments(
        mean_f=rayleigh_mean(params.alpha_f_sq),
        mean_g=rayleigh_mean(params.alpha_g_sq),
        mean_sq_f=2.0 * params.alpha_f_sq,
        mean_sq_g=2.0 * params.alpha_g_sq,
        mean_h=rayleigh_mean(params.alpha_h_sq),
    )


def alignment_phases(realization: ChannelRealization, phase_h: float | None = None) -> np.ndarray:
    """theta(n) = 2 pi phi_f(n) - 2 pi phi_g(n) - phi_h.

    ``phase_h`` defaults to 0, the convention used throughout the analysis;
    pass ``realization.phase_h`` to align against the sampled direct path.
    """
    if not realization.has_phases:
        raise ValueError("realization was sampled without phases")
    ph = 0.0 if phase_h is None else phase_h
    return 2.0 * math.pi * realization.phase_f - 2.0 * math.pi * realization.phase_g - ph


def cascade_sum(realization: ChannelRealization, theta: np.ndarray, gain=1.0) -> complex:
    """sum_n f*(n) p(n) g(n) with p(n) = gain * exp(j theta(n))."""
    f_conj = realization.f_mag * np.exp(-2j * math.pi * realization.phase_f)
    g = realization.g_mag * np.exp(2j * math.pi * realization.phase_g)
    p = gain * np.exp(1j * theta)
    return complex(np.sum(f_conj * p * g))


def apply_phase_alignment(realization: ChannelRealization, gain=1.0,
                          phase_h: float | None = None) -> tuple[complex, float]:
    """Apply the aligning phases and return (complex cascade, magnitude-product sum).

    With the aligning phases the complex cascade equals
    ``exp(-j phi_h) * gain * sum |f||g|``; with ``phi_h = 0`` it is real and
    equal to the second returned value.
    """
    theta = alignment_phases(realization, phase_h)
    ph = 0.0 if phase_h is None else phase_h
    total = cascade_sum(realization, theta, gain) * complex(math.cos(ph), math.sin(ph))
    return total, float(gain * np.sum(realization.f_mag * realization.g_mag))


def dump_csv(realization: ChannelRealization, path) -> None:
    """Write one realization as CSV for debugging."""
    cols = [realization.g_mag, realization.f_mag]
    header = "g_mag,f_mag"
    if realization.has_phases:
        cols += [realization.phase_g, realization.phase_f]
        header += ",phase_g,phase_f"
    np.savetxt(path, np.column_stack(cols), delimiter=",", header=header, comments="",
               fmt="%.12e")
