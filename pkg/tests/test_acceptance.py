"""Acceptance criteria, one test each, each emitting a single PASS/FAIL line.

The lines are collected and shown in the pytest terminal summary; running
this file directly also prints them.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from risee import asymptotic as asy
from risee import crossover as cx
from risee.channel import moments, sample
from risee.exact import ACTIVE, exact_ee_active, exact_power_active, monte_carlo
from risee.pa_opt import grid_argmax_beta, optimal_beta, polynomial_roots
from risee.params import RayleighParams, dbm_to_watts


def verdict(number: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_asymptotic_fit(scenario, pl):
    start = time.perf_counter()
    gaps = []
    for n in (256, 1024, 4096):
        cfg = scenario.system.replace(num_elements=n)
        c = asy.constants(pl, scenario.rayleigh, cfg)
        mc = monte_carlo(cfg, pl, scenario.rayleigh, ACTIVE, trials=100_000, seed=0)
        ref = asy.ee_asymptotic_active(cfg, c).ee_bits_per_joule
        gaps.append(abs(mc.mean_ee - ref) / ref)
    elapsed = time.perf_counter() - start
    ok = max(gaps) < 0.05 and all(b <= a for a, b in zip(gaps, gaps[1:])) and elapsed < 120
    verdict(1, "Monte Carlo vs asymptotic EE", ok,
            "gaps " + ", ".join(f"{g:.2e}" for g in gaps) + f"; {elapsed:.1f} s")


def test_2_beta_optimizer(config, consts):
    opt = optimal_beta(config, consts)
    grid = np.linspace(0, 1, 1000)
    ee = asy.ee_of_beta(grid, asy.beta_coeffs(config, consts))
    argmax = float(grid[int(np.argmax(ee))])
    slope_flips = int(np.count_nonzero(np.diff(np.sign(np.diff(ee)))))
    ok = abs(opt.beta - argmax) < 0.02 and slope_flips == 1
    verdict(2, "closed-form PA factor", ok,
            f"beta_b={opt.beta:.4f} grid={argmax:.4f} slope sign changes={slope_flips}")


def test_3_pt_limit(config, consts):
    worst = 0.0
    ok = True
    for n in (64, 256, 1024):
        cfg = config.replace(num_elements=n)
        ee = asy.ee_of_pt(dbm_to_watts(np.arange(10.0, 100.5, 1.0)), asy.pt_coeffs(cfg, consts))
        flips = np.count_nonzero(np.diff(np.sign(np.diff(ee))))
        ratio = ee[-1] / ee.max()
        worst = max(worst, ratio)
        ok &= flips <= 1 and ratio < 0.10
    verdict(3, "EE vanishes at high transmit power", bool(ok),
            f"max EE(100 dBm)/peak = {worst:.2e}")


def test_4_noise_limits(config, consts):
    grid = dbm_to_watts(np.arange(-160.0, -39.5, 2.0))
    a = asy.sigma_r_coeffs(config, consts)
    d = asy.sigma_u_coeffs(config, consts)
    err_r = abs(asy.ee_of_sigma_r(1e-16, a) / asy.limit_sigma_r_zero(config, consts) - 1)
    err_u = abs(asy.ee_of_sigma_u(1e-16, d) / asy.limit_sigma_u_zero(config, consts) - 1)
    mono_r = bool(np.all(np.diff(asy.ee_of_sigma_r(grid, a)) <= 0))
    mono_u = bool(np.all(np.diff(asy.ee_of_sigma_u(grid, d)) <= 0))
    ok = err_r < 0.01 and err_u < 0.01 and mono_r and mono_u
    verdict(4, "noise limits", ok,
            f"rel err sr={err_r:.1e} su={err_u:.1e}; nonincreasing sr={mono_r} su={mono_u}")


def test_5_crossover(config, consts):
    m = cx.crossover_coeffs(config, consts)
    ns = np.geomspace(2 ** 4, 2 ** 16, 481)
    flips = int(np.count_nonzero(np.diff(np.sign([cx.f_value(1 / n, m) for n in ns]))))
    res = {k: cx.crossover_n(config, consts, k) for k in cx.METHODS}
    a_n, a_b, a_s = (res[k].report.alpha_root for k in (cx.NEWTON, cx.BISECTION, cx.ANNEALING))
    resid = 0.0
    for r in res.values():
        f1, f2 = cx.f_parts(r.report.alpha_root, m)
        resid = max(resid, abs(f1 - f2) / max(abs(f1), abs(f2)))
    n0 = 1 / a_n
    checks = {
        "one sign change": flips == 1,
        "newton~bisection": abs(a_n - a_b) <= 1e-6 * a_b,
        "annealing~bisection": abs(a_s - a_b) <= 1e-3 * a_b,
        "residual": resid <= 1e-9,
        "N0 range": 2 ** 8 <= n0 <= 2 ** 12,
        "signs": cx.f_value(4 / n0, m) > 0 > cx.f_value(1 / (4 * n0), m),
    }
    failed = [k for k, v in checks.items() if not v]
    verdict(5, "crossover element count", not failed,
            f"N0={n0:.2f} (2^{math.log2(n0):.2f}), worst rel residual {resid:.1e}"
            + (f"; failed: {failed}" if failed else ""))


def test_6_convergence_ordering(scenario, config, consts):
    m = cx.crossover_coeffs(config, consts)
    its = {
        cx.NEWTON: cx.solve_newton(m, tol=0.0, max_iter=20).iterations_to(1e-6),
        cx.BISECTION: cx.solve_bisection(m).iterations_to(1e-6),
        cx.ANNEALING: cx.solve_annealing(m, scenario.annealing, seed=0).iterations_to(1e-6),
    }
    ok = None not in its.values() and its[cx.NEWTON] < its[cx.BISECTION] < its[cx.ANNEALING]
    verdict(6, "solver convergence ordering", ok,
            ", ".join(f"{k}={v}" for k, v in its.items()))


def test_7_oracle_suites(config, consts, pl):
    from test_pa_opt import companion_roots, match_error, random_well_conditioned_quartic
    rng = np.random.default_rng(7)
    ferrari_err = 0.0
    for _ in range(1000):
        coeffs = random_well_conditioned_quartic(rng)
        ferrari_err = max(ferrari_err, match_error(polynomial_roots(coeffs), companion_roots(coeffs)))

    m = cx.crossover_coeffs(config, consts)
    deriv_err = 0.0
    for alpha in 10.0 ** rng.uniform(-4.8, -0.2, 100):
        h = 1e-7 * alpha
        fd = (cx.f_value(alpha + h, m) - cx.f_value(alpha - h, m)) / (2 * h)
        deriv_err = max(deriv_err, abs(cx.f_and_derivative(alpha, m)[1] - fd) / abs(fd))

    ray = RayleighParams()
    draws = 10 ** 6
    x = sample(ray, draws, seed=1).g_mag
    mom = moments(ray)
    z_mean = abs(x.mean() - mom.mean_g) / math.sqrt((4 - math.pi) / 2 * ray.alpha_g_sq / draws)
    z_sq = abs((x ** 2).mean() - mom.mean_sq_g) / math.sqrt(4 * ray.alpha_g_sq ** 2 / draws)

    power_err = 0.0
    for seed in range(20):
        for beta in (0.1, 0.5, 0.9):
            cfg = config.replace(num_elements=256, pa_factor=beta)
            br = exact_power_active(sample(ray, 256, seed=seed), cfg, pl)
            power_err = max(power_err, abs(br.p_out_elementwise - br.p_out) / br.p_out)

    ok = ferrari_err < 1e-8 and deriv_err < 1e-5 and z_mean < 3 and z_sq < 3 and power_err < 1e-10
    verdict(7, "oracle suites", ok,
            f"ferrari {ferrari_err:.1e}, f' {deriv_err:.1e}, moments z={z_mean:.2f}/{z_sq:.2f}, "
            f"power {power_err:.1e}")


def test_8_structural(scenario, config, consts, pl):
    cfg2 = config.replace(bandwidth_hz=2 * config.bandwidth_hz)
    ee1 = asy.ee_asymptotic_active(config, consts).ee_bits_per_joule
    ee2 = asy.ee_asymptotic_active(cfg2, consts).ee_bits_per_joule
    r = sample(scenario.rayleigh, config.num_elements, seed=4)
    x1 = exact_ee_active(r, config, pl).ee_bits_per_joule
    x2 = exact_ee_active(r, cfg2, pl).ee_bits_per_joule
    linear = ee2 == 2 * ee1 and x2 == 2 * x1
    invariant = optimal_beta(config, consts).beta == optimal_beta(cfg2, consts).beta
    small = config.replace(num_elements=64)
    runs = [monte_carlo(small, pl, scenario.rayleigh, ACTIVE, trials=400, seed=99, workers=w)
            for w in (1, 2, 4)]
    identical = all(run == runs[0] for run in runs)
    ok = linear and invariant and identical
    verdict(8, "structural invariants", ok,
            f"EE(2B)=2EE(B) {linear}, beta_b invariant {invariant}, workers bit-identical {identical}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
