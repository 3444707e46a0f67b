"""Closed-form power allocation between BS and active RIS.

A first-order Taylor surrogate of EE(beta) is a cubic-over-quadratic
rational function; its stationary points solve a quartic, which is solved
with Ferrari's method. The stationary points only *propose* candidates:
the final choice maximizes the full asymptotic EE(beta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from risee.asymptotic import LN2, AsymptoticConstants, BetaCoeffs, beta_coeffs, ee_of_beta
from risee.params import SystemConfig

REAL_TOL = 1e-9
_OMEGA = cmath.exp(2j * math.pi / 3)


@dataclass(frozen=True)
class TaylorBetaModel:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    bandwidth: float


def taylor_model(q: BetaCoeffs) -> TaylorBetaModel:
    """Linearize sqrt(q4 b^2 + q5 b + q6) about b = 0 and log2(1 + x) about x = 0."""
    if q.q6 <= 0.0:
        raise ValueError("Taylor model needs q6 > 0 (nonzero RIS noise)")
    rq6 = math.sqrt(q.q6)
    c1 = q.q3 * q.q4 / (2.0 * rq6)
    c2 = q.q1 + q.q3 * q.q5 / (2.0 * rq6)
    c3 = q.q2 + q.q3 * q.q6
    return TaylorBetaModel(
        c1=c1, c2=c2, c3=c3,
        c4=q.q7 * q.q10,
        c5=q.q7 * q.q9 + q.q8 * q.q10,
        c6=q.q8 * q.q9,
        bandwidth=q.bandwidth,
    )


def taylor_ee(beta, model: TaylorBetaModel):
    b = np.asarray(beta, dtype=float)
    den = model.c4 * b ** 2 + model.c5 * b + model.c6
    if np.any(den == 0.0):
        raise ZeroDivisionError("Taylor EE denominator vanishes")
    out = model.bandwidth / LN2 * (model.c1 * b ** 3 + model.c2 * b ** 2 + model.c3 * b) / den
    return float(out) if out.ndim == 0 else out


def stationary_quartic(model: TaylorBetaModel) -> tuple[float, float, float, float, float]:
    """Numerator coefficients (l1..l5) of d/dbeta of the Taylor EE."""
    c1, c2, c3, c4, c5, c6 = (model.c1, model.c2, model.c3, model.c4, model.c5, model.c6)
    return (c1 * c4, 2 * c1 * c5, 3 * c1 * c6 + c2 * c5 - c3 * c4, 2 * c2 * c6, c3 * c6)


# ---------------------------------------------------------------------------
# polynomial roots

def _poly_eval(coeffs, x):
    acc = 0j
    for a in coeffs:
        acc = acc * x + a
    return acc


def _poly_deriv(coeffs):
    deg = len(coeffs) - 1
    return [a * (deg - i) for i, a in enumerate(coeffs[:-1])]


def _polish(coeffs, roots, steps: int = 6):
    """A few Newton steps on the original polynomial; keep a step only if it helps."""
    deriv = _poly_deriv(coeffs)
    out = []
    for r in roots:
        best, best_res = r, abs(_poly_eval(coeffs, r))
        x = r
        for _ in range(steps):
            d = _poly_eval(deriv, x)
            if d == 0:
                break
            x = x - _poly_eval(coeffs, x) / d
            res = abs(_poly_eval(coeffs, x))
            if res < best_res:
                best, best_res = x, res
            else:
                break
        out.append(best)
    return out


def _cbrt(z: complex) -> complex:
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3.0)


@dataclass(frozen=True)
class QuarticProblem:
    """Monic quartic x^4 + E x^3 + B x^2 + C x + D with Ferrari intermediates."""

    l: tuple[float, float, float, float, float]
    e1: float
    b1: float
    c1: float
    d1: float
    alpha1: complex
    beta1: complex
    gamma1: complex
    eta1: complex
    mu1: complex
    mu2: complex
    roots: tuple[complex, complex, complex, complex] = field(repr=False)


def ferrari(l1: float, l2: float, l3: float, l4: float, l5: float) -> QuarticProblem:
    """Solve a genuine quartic by Ferrari's method, keeping every intermediate.

    Intermediates are complex: the resolvent routinely passes through complex
    values even when all four roots are real.
    """
    if l1 == 0.0:
        raise ValueError("leading coefficient is zero; not a quartic")
    e, b, c, d = l2 / l1, l3 / l1, l4 / l1, l5 / l1
    alpha1 = complex((3 * e * c - 12 * d - b ** 2) / 3.0)
    beta1 = complex((-2 * b ** 3 + 9 * e * b * c + 72 * b * d - 27 * c ** 2 - 27 * e ** 2 * d) / 27.0)
    disc = cmath.sqrt(beta1 ** 2 / 4 + alpha1 ** 3 / 27)
    u = _cbrt(-beta1 / 2 + disc)
    if abs(u) < 1e-300:
        u = _cbrt(-beta1 / 2 - disc)
    # any root of the resolvent cubic works; the one giving the largest
    # eta^2 keeps the 1/eta term below well conditioned
    gammas = []
    for k in range(3):
        uk = u * _OMEGA ** k
        vk = -alpha1 / (3 * uk) if uk != 0 else 0j
        gammas.append(b / 3 + uk + vk)
    gamma1 = max(gammas, key=lambda g: abs(e ** 2 / 4 - b + g))
    eta1 = cmath.sqrt(e ** 2 / 4 - b + gamma1)
    base = 0.75 * e ** 2 - eta1 ** 2 - 2 * b
    scale = max(1.0, abs(e) ** 2, abs(b))
    if abs(eta1) ** 2 > 1e-14 * scale:
        t = (4 * e * b - 8 * c - e ** 3) / (4 * eta1)
        mu1 = cmath.sqrt(base + t)
        mu2 = cmath.sqrt(base - t)
    else:
        s = cmath.sqrt(gamma1 ** 2 - 4 * d)
        mu1 = cmath.sqrt(0.75 * e ** 2 - 2 * b + 2 * s)
        mu2 = cmath.sqrt(0.75 * e ** 2 - 2 * b - 2 * s)
    roots = (-e / 4 + eta1 / 2 + mu1 / 2, -e / 4 + eta1 / 2 - mu1 / 2,
             -e / 4 - eta1 / 2 + mu2 / 2, -e / 4 - eta1 / 2 - mu2 / 2)
    return QuarticProblem((l1, l2, l3, l4, l5), e, b, c, d, alpha1, beta1, gamma1,
                          eta1, mu1, mu2, roots)


def cubic_roots_complex(a: float, b: float, c: float, d: float) -> list[complex]:
    """All roots of a x^3 + b x^2 + c x + d (Cardano, complex arithmetic)."""
    bb, cc, dd = b / a, c / a, d / a
    p = cc - bb ** 2 / 3
    q = 2 * bb ** 3 / 27 - bb * cc / 3 + dd
    disc = cmath.sqrt(q ** 2 / 4 + p ** 3 / 27)
    u = _cbrt(-q / 2 + disc)
    if abs(u) < 1e-300:
        u = _cbrt(-q / 2 - disc)
    out = []
    for k in range(3):
        uk = u * _OMEGA ** k
        vk = -p / (3 * uk) if uk != 0 else 0j
        out.append(uk + vk - bb / 3)
    return out


def quadratic_roots_complex(a: float, b: float, c: float) -> list[complex]:
    disc = cmath.sqrt(b * b - 4 * a * c)
    # avoid cancellation in -b +/- disc
    qv = -0.5 * (b + disc) if b >= 0 else -0.5 * (b - disc)
    if qv == 0:
        return [0j, 0j]
    return [qv / a, c / qv]


def polynomial_roots(coeffs) -> list[complex]:
    """Complex roots of a degree <= 4 polynomial, highest power first."""
    coeffs = [float(x) for x in coeffs]
    scale = max(abs(x) for x in coeffs)
    if scale == 0.0:
        raise ValueError("all polynomial coefficients are zero")
    # drop negligible leading terms
    while len(coeffs) > 1 and abs(coeffs[0]) < 1e-12 * scale:
        coeffs = coeffs[1:]
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    if deg == 1:
        roots = [complex(-coeffs[1] / coeffs[0])]
    elif deg == 2:
        roots = quadratic_roots_complex(*coeffs)
    elif deg == 3:
        roots = cubic_roots_complex(*coeffs)
    else:
        roots = list(ferrari(*coeffs).roots)
    return _polish(coeffs, roots)


def ferrari_roots(l1: float, l2: float, l3: float, l4: float, l5: float) -> list[float]:
    """Real roots (ascending, with multiplicity) of l1 x^4 + l2 x^3 + l3 x^2 + l4 x + l5."""
    roots = polynomial_roots((l1, l2, l3, l4, l5))
    real = [r.real for r in roots if abs(r.imag) < REAL_TOL * (1.0 + abs(r.real))]
    return sorted(real)


# ---------------------------------------------------------------------------
# optimizer

@dataclass(frozen=True)
class BetaOptimum:
    beta: float
    ee: float
    candidates: tuple[float, ...]
    candidate_ee: tuple[float, ...]
    stationary_points: tuple[float, ...]
    model: TaylorBetaModel | None


def feasible(candidate: float) -> float:
    """Candidates outside [0, 1] are replaced by 0."""
    return candidate if 0.0 <= candidate <= 1.0 else 0.0


def optimal_beta(config: SystemConfig, c: AsymptoticConstants) -> BetaOptimum:
    """Pick the best of {0, 1, feasible stationary points} under the full EE(beta)."""
    q = beta_coeffs(config, c)
    try:
        model = taylor_model(q)
        l = stationary_quartic(model)
        stationary = ferrari_roots(*l) if any(l) else []
    except ValueError:
        model, stationary = None, []
    # keep four slots; missing real roots are infeasible and map to 0
    slots = list(stationary) + [math.nan] * (4 - len(stationary))
    candidates = (0.0, 1.0) + tuple(feasible(s) if math.isfinite(s) else 0.0 for s in slots)
    values = []
    for b in candidates:
        v = ee_of_beta(b, q)
        values.append(v if math.isfinite(v) else -math.inf)
    best = None
    for b, v in zip(candidates, values):
        if best is None or v > best[1] or (v == best[1] and b < best[0]):
            best = (b, v)
    return BetaOptimum(beta=best[0], ee=best[1], candidates=candidates,
                       candidate_ee=tuple(values), stationary_points=tuple(stationary),
                       model=model)


def grid_argmax_beta(config: SystemConfig, c: AsymptoticConstants, points: int = 1001) -> float:
    """Brute-force reference: argmax of the full EE over a uniform beta grid."""
    q = beta_coeffs(config, c)
    grid = np.linspace(0.0, 1.0, points)
    vals = ee_of_beta(grid, q)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    return float(grid[int(np.argmax(vals))])
