"""Element count at which active and passive RIS have equal energy efficiency.

With alpha = 1/N the balance EE_active(N) = EE_passive(N) becomes
f(alpha) = f1(alpha) - f2(alpha) = 0, where

    f1(alpha) = log2(1 + (m1 + m2 sqrt(alpha) + m3 alpha) / alpha) / (m4 + m5 alpha)
    f2(alpha) = log2(1 + (m6 + m7 alpha + m8 alpha^2) / alpha^2) / (Pcn_p + m9 alpha)

so that f(alpha) = (EE_active - EE_passive) / (alpha B). Three solvers find
the zero: Newton, bisection and simulated annealing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from risee.asymptotic import LN2, AsymptoticConstants, _radicand
from risee.params import AnnealingSchedule, SystemConfig

NEWTON = "newton"
BISECTION = "bisection"
ANNEALING = "annealing"
METHODS = (NEWTON, BISECTION, ANNEALING)

N_MAX = 2 ** 20
ALPHA_MIN = 1.0 / N_MAX


class SolverError(RuntimeError):
    pass


class NoCrossoverError(SolverError):
    pass


@dataclass(frozen=True)
class CrossoverCoeffs:
    m1: float
    m2: float
    m3: float
    m4: float
    m5: float
    m6: float
    m7: float
    m8: float
    m9: float
    p_cn_passive: float
    bandwidth: float


def crossover_coeffs(config: SystemConfig, c: AsymptoticConstants) -> CrossoverCoeffs:
    b, pt = config.pa_factor, config.total_power_w
    sr, su = config.noise_ris_w, config.noise_user_w
    if su <= 0.0:
        raise ValueError("crossover analysis needs noise_user_w > 0")
    noise = c.a6 * pt * (1 - b) * sr + c.a5 * b * pt * su + sr * su
    terms = (c.a5 * b * pt ** 2 * (1 - b), b * pt * sr, pt * sr)
    root = math.sqrt(float(_radicand(terms[0] - terms[1] + terms[2], sum(abs(t) for t in terms))))
    extra_bs = (config.amp_inefficiency - 1.0) * b * pt
    return CrossoverCoeffs(
        m1=c.a1 * pt ** 2 * b * (1 - b) / noise,
        m2=b * pt * c.a4 * root / noise,
        m3=(c.a2 * b ** 2 * pt ** 2 + c.a3 * b * pt * sr) / noise,
        m4=-c.a5 * b * pt - sr + config.static_per_element_active_w,
        m5=pt + c.a7 + extra_bs,
        m6=c.a8 * pt / su,
        m7=c.a9 * pt / su,
        m8=c.a10 * pt / su,
        m9=config.amp_inefficiency * pt + c.a11,
        p_cn_passive=config.static_per_element_passive_w,
        bandwidth=config.bandwidth_hz,
    )


def ee_active_of_n(n, m: CrossoverCoeffs):
    n = np.asarray(n, dtype=float)
    den = m.m4 * n + m.m5
    if np.any(den <= 0):
        raise ValueError("nonpositive active consumption")
    out = m.bandwidth * np.log2(1 + m.m1 * n + m.m2 * np.sqrt(n) + m.m3) / den
    return float(out) if out.ndim == 0 else out


def ee_passive_of_n(n, m: CrossoverCoeffs):
    n = np.asarray(n, dtype=float)
    den = m.p_cn_passive * n + m.m9
    if np.any(den <= 0):
        raise ValueError("nonpositive passive consumption")
    out = m.bandwidth * np.log2(1 + m.m6 * n ** 2 + m.m7 * n + m.m8) / den
    return float(out) if out.ndim == 0 else out


def f_parts(alpha: float, m: CrossoverCoeffs) -> tuple[float, float]:
    """(f1(alpha), f2(alpha))."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    ra = math.sqrt(alpha)
    d1 = m.m4 + m.m5 * alpha
    d2 = m.p_cn_passive + m.m9 * alpha
    if d1 <= 0 or d2 <= 0:
        raise ValueError("nonpositive consumption in f(alpha)")
    u = 1 + m.m3 + m.m1 / alpha + m.m2 / ra
    v = 1 + m.m8 + m.m7 / alpha + m.m6 / alpha ** 2
    return math.log2(u) / d1, math.log2(v) / d2


def f_value(alpha: float, m: CrossoverCoeffs) -> float:
    f1, f2 = f_parts(alpha, m)
    return f1 - f2


def f_and_derivative(alpha: float, m: CrossoverCoeffs) -> tuple[float, float]:
    """f(alpha) and its exact derivative (quotient rule on each part)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    ra = math.sqrt(alpha)
    u = 1 + m.m3 + m.m1 / alpha + m.m2 / ra
    du = -m.m1 / alpha ** 2 - 0.5 * m.m2 / (alpha * ra)
    d1 = m.m4 + m.m5 * alpha
    v = 1 + m.m8 + m.m7 / alpha + m.m6 / alpha ** 2
    dv = -m.m7 / alpha ** 2 - 2.0 * m.m6 / alpha ** 3
    d2 = m.p_cn_passive + m.m9 * alpha
    if d1 <= 0 or d2 <= 0:
        raise ValueError("nonpositive consumption in f(alpha)")
    l1, l2 = math.log2(u), math.log2(v)
    f1 = l1 / d1
    f2 = l2 / d2
    df1 = (du / (u * LN2) * d1 - l1 * m.m5) / d1 ** 2
    df2 = (dv / (v * LN2) * d2 - l2 * m.m9) / d2 ** 2
    return f1 - f2, df1 - df2


# ---------------------------------------------------------------------------
# solvers

@dataclass
class RootSolveReport:
    alpha_root: float
    method: str
    iterations: int
    residual: float
    converged: bool
    trace: list[tuple[float, float]] = field(default_factory=list)
    bracket: tuple[float, float] | None = None

    @property
    def n_equivalent(self) -> float:
        return 1.0 / self.alpha_root

    @property
    def n_floor(self) -> int:
        return math.floor(self.n_equivalent)

    @property
    def n_ceil(self) -> int:
        return math.ceil(self.n_equivalent)

    def iterations_to(self, residual: float) -> int | None:
        """First iteration whose |f| is at or below ``residual`` (1-based), or None."""
        for i, (_, fv) in enumerate(self.trace, 1):
            if abs(fv) <= residual:
                return i
        return None


def _as_functions(problem) -> tuple[Callable[[float], float], Callable[[float], tuple[float, float]]]:
    if isinstance(problem, CrossoverCoeffs):
        return (lambda a: f_value(a, problem)), (lambda a: f_and_derivative(a, problem))
    if callable(problem):
        return problem, None
    raise TypeError("problem must be CrossoverCoeffs or a callable")


def solve_newton(problem, alpha0: float | None = None, tol: float = 1e-6, max_iter: int = 100,
                 derivative: Callable[[float], float] | None = None,
                 alpha_min: float = ALPHA_MIN) -> RootSolveReport:
    """Newton iteration alpha <- alpha - f/f', clamped to [alpha_min, 1].

    ``problem`` is a CrossoverCoeffs, or a callable f with ``derivative``
    given separately. Without ``alpha0`` the iteration starts at the
    large-N end of the sign-scan bracket: f has an interior maximum, and
    from the small-N side of it the tangent points away from the root.
    """
    f, fdf = _as_functions(problem)
    if fdf is None:
        if derivative is None:
            raise ValueError("a callable problem needs an explicit derivative")
        fdf = lambda a: (f(a), derivative(a))  # noqa: E731
    if alpha0 is None:
        alpha0 = find_bracket(f, alpha_min)[0]
    if not 0 < alpha0 <= 1:
        raise ValueError("alpha0 must lie in (0, 1]")
    alpha = alpha0
    trace = []
    fv, dfv = fdf(alpha)
    for it in range(1, max_iter + 1):
        if abs(dfv) < 1e-14:
            raise SolverError(f"derivative vanished at alpha={alpha:.6g}")
        alpha = min(max(alpha - fv / dfv, alpha_min), 1.0)
        fv, dfv = fdf(alpha)
        trace.append((alpha, fv))
        if abs(fv) <= tol:
            return RootSolveReport(alpha, NEWTON, it, abs(fv), True, trace)
    return RootSolveReport(alpha, NEWTON, max_iter, abs(fv), False, trace)


def find_bracket(f: Callable[[float], float], lo: float = ALPHA_MIN, hi: float = 1.0,
                 points: int = 64) -> tuple[float, float]:
    """First sign change on a log-spaced scan of [lo, hi]."""
    grid = np.geomspace(lo, hi, points)
    vals = [f(a) for a in grid]
    for i in range(points - 1):
        if vals[i] == 0.0:
            return float(grid[i]), float(grid[i])
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            return float(grid[i]), float(grid[i + 1])
    if vals[-1] == 0.0:
        return hi, hi
    raise NoCrossoverError(f"no crossover in range alpha in [{lo:.3g}, {hi:.3g}]")


def solve_bisection(problem, tol: float = 1e-15, max_iter: int = 200,
                    bracket: tuple[float, float] | None = None) -> RootSolveReport:
    """Halve [eps1, eps2] keeping the half whose ends have opposite signs.

    Without an explicit ``bracket`` the interval comes from a sign scan
    of [1/N_MAX, 1]; the open end alpha = 0 is not usable.
    """
    f, _ = _as_functions(problem)
    lo, hi = bracket if bracket is not None else find_bracket(f)
    f_lo = f(lo)
    if f_lo == 0.0:
        return RootSolveReport(lo, BISECTION, 0, 0.0, True, [], (lo, hi))
    if f(hi) == 0.0:
        return RootSolveReport(hi, BISECTION, 0, 0.0, True, [], (lo, hi))
    if np.sign(f_lo) == np.sign(f(hi)):
        raise NoCrossoverError("bracket ends have the same sign")
    trace = []
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        trace.append((mid, f_mid))
        if f_mid == 0.0:
            return RootSolveReport(mid, BISECTION, it, 0.0, True, trace, (mid, mid))
        if np.sign(f_mid) != np.sign(f_lo):
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo <= tol:
            root = 0.5 * (lo + hi)
            return RootSolveReport(root, BISECTION, it, abs(f(root)), True, trace, (lo, hi))
    root = 0.5 * (lo + hi)
    return RootSolveReport(root, BISECTION, max_iter, abs(f(root)), False, trace, (lo, hi))


def solve_annealing(problem, schedule: AnnealingSchedule = AnnealingSchedule(), seed: int = 0,
                    alpha0: float | None = None, tol: float = 1e-4,
                    bounds: tuple[float, float] = (ALPHA_MIN, 1.0)) -> RootSolveReport:
    """Simulated annealing on the energy |f(alpha)|.

    Proposals are Gaussian steps in log(alpha) whose scale shrinks with the
    temperature; uphill moves are accepted with probability exp(-eta / T)
    (Metropolis). Returns the best point seen. The trace records the best
    point after every proposal.
    """
    f, _ = _as_functions(problem)
    rng = np.random.default_rng(seed)
    lo, hi = math.log(bounds[0]), math.log(bounds[1])
    x = 0.5 * (lo + hi) if alpha0 is None else math.log(alpha0)
    energy = abs(f(math.exp(x)))
    best_x, best_e = x, energy
    trace = []
    t = schedule.t0
    it = 0
    while t >= schedule.t_min:
        scale = schedule.step * t / schedule.t0
        for _ in range(schedule.proposals_per_temp):
            it += 1
            cand = x + scale * rng.standard_normal()
            # reflect into the domain
            if cand < lo:
                cand = min(2 * lo - cand, hi)
            elif cand > hi:
                cand = max(2 * hi - cand, lo)
            e_new = abs(f(math.exp(cand)))
            eta = e_new - energy
            if eta <= 0 or rng.random() < math.exp(-eta / t):
                x, energy = cand, e_new
                if energy < best_e:
                    best_x, best_e = x, energy
            trace.append((math.exp(best_x), best_e))
        t *= schedule.cooling
    alpha = math.exp(best_x)
    return RootSolveReport(alpha, ANNEALING, it, best_e, best_e <= tol, trace)


# ---------------------------------------------------------------------------

@dataclass
class CrossoverResult:
    report: RootSolveReport
    f_floor: float
    f_ceil: float

    @property
    def n0(self) -> float:
        return self.report.n_equivalent

    def side(self, n: int) -> str:
        fv = self.f_floor if n == self.report.n_floor else self.f_ceil
        return "active" if fv > 0 else "passive" if fv < 0 else "equal"


def crossover_n(config: SystemConfig, c: AsymptoticConstants, method: str = NEWTON,
                schedule: AnnealingSchedule = AnnealingSchedule(), seed: int = 0,
                tol: float = 1e-6) -> CrossoverResult:
    """Solve for N0 and report the bracketing integers with their f signs.

    Positive f means the active RIS is more energy efficient at that N.
    """
    m = crossover_coeffs(config, c)
    if method == NEWTON:
        rep = solve_newton(m, tol=tol)
        if not rep.converged:
            raise SolverError(f"Newton did not converge (residual {rep.residual:.3g})")
    elif method == BISECTION:
        rep = solve_bisection(m)
    elif method == ANNEALING:
        rep = solve_annealing(m, schedule, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    n_lo, n_hi = max(rep.n_floor, 1), max(rep.n_ceil, 1)
    return CrossoverResult(rep, f_value(1.0 / n_lo, m), f_value(1.0 / n_hi, m))
