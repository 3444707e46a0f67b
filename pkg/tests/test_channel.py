import math

import numpy as np
import pytest

from risee.channel import (
    ChannelRealization, alignment_phases, apply_phase_alignment, moments, rayleigh_inverse_cdf,
    sample, trial_rng,
)
from risee.params import RayleighParams


def test_sampling_is_deterministic():
    a = sample(RayleighParams(), 4, seed=7, with_phases=True)
    b = sample(RayleighParams(), 4, seed=7, with_phases=True)
    np.testing.assert_array_equal(a.g_mag, b.g_mag)
    np.testing.assert_array_equal(a.phase_f, b.phase_f)
    assert a.h_mag == b.h_mag
    c = sample(RayleighParams(), 4, seed=7, index=1)
    assert not np.array_equal(a.g_mag, c.g_mag)


def test_trial_streams_are_independent_of_order():
    x = trial_rng(3, 5).random(3)
    trial_rng(3, 0).random(100)
    np.testing.assert_array_equal(x, trial_rng(3, 5).random(3))


def test_inverse_cdf_against_closed_form_cdf():
    # F(x) = 1 - exp(-x^2 / (2 a^2)); inverse must round-trip
    u = np.linspace(0.0, 0.999, 50)
    x = rayleigh_inverse_cdf(u, 0.7)
    np.testing.assert_allclose(1.0 - np.exp(-x ** 2 / (2 * 0.7)), u, atol=1e-12)


def test_moments_examples():
    m = moments(RayleighParams(0.5, 0.5, 0.5))
    assert m.mean_g == pytest.approx(math.sqrt(math.pi) / 2)
    assert m.mean_f == pytest.approx(math.sqrt(math.pi) / 2)
    assert m.mean_sq_g == pytest.approx(1.0)


@pytest.mark.parametrize("alpha_sq", [0.5, 2.0])
def test_sample_moments_within_three_sigma(alpha_sq):
    n = 10 ** 6
    r = sample(RayleighParams(alpha_sq, alpha_sq, alpha_sq), n, seed=11)
    m = moments(RayleighParams(alpha_sq, alpha_sq, alpha_sq))
    sd_mean = math.sqrt((4 - math.pi) / 2 * alpha_sq / n)
    sd_sq = math.sqrt(4 * alpha_sq ** 2 / n)
    for x in (r.g_mag, r.f_mag):
        assert abs(x.mean() - m.mean_g) < 3 * sd_mean
        assert abs((x ** 2).mean() - m.mean_sq_g) < 3 * sd_sq


def test_alignment_with_zero_phases():
    z = np.zeros(3)
    r = ChannelRealization(np.ones(3), np.ones(3), 1.0, z, z, 0.0)
    np.testing.assert_array_equal(alignment_phases(r), 0.0)


def test_single_element_alignment_formula():
    r = ChannelRealization(np.ones(1), np.ones(1), 1.0, np.array([1 / 6]), np.array([1 / 10]), 0.0)
    theta = alignment_phases(r)
    assert theta[0] == pytest.approx(2 * math.pi * (1 / 10 - 1 / 6))


@pytest.mark.parametrize("phase_h", [None, 1.1])
def test_alignment_makes_cascade_coherent(phase_h):
    r = sample(RayleighParams(), 8, seed=3, with_phases=True)
    theta = alignment_phases(r, phase_h)
    gain = 1.7
    # direct complex arithmetic: sum conj(f) p g, with every phase explicit
    f = r.f_mag * np.exp(2j * np.pi * r.phase_f)
    g = r.g_mag * np.exp(2j * np.pi * r.phase_g)
    total = sum(np.conj(fi) * gain * np.exp(1j * t) * gi for fi, gi, t in zip(f, g, theta))
    expected = gain * np.sum(r.f_mag * r.g_mag)
    assert abs(total) == pytest.approx(expected, rel=1e-12)
    aligned, mags = apply_phase_alignment(r, gain, phase_h)
    assert mags == pytest.approx(expected, rel=1e-12)
    assert abs(aligned - expected) < 1e-12 * expected


def test_alignment_needs_phases():
    with pytest.raises(ValueError):
        alignment_phases(sample(RayleighParams(), 2, seed=0))


def test_realization_checks():
    with pytest.raises(ValueError):
        ChannelRealization(np.ones(2), np.ones(3), 1.0)
    with pytest.raises(ValueError):
        ChannelRealization(-np.ones(2), np.ones(2), 1.0)
