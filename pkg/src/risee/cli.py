"""Command line runner: one sweep per figure, written as CSV plus a JSON sidecar.

Usage::

    risee run --figure fig2_ee_vs_n --out fig2.csv [--config my.cfg] [--trials 100000]
    risee beta [--config my.cfg]
    risee crossover --method all

CSV files start with ``#`` metadata lines (the resolved scenario), then a
header row. Floats use 12 significant digits; invalid points are empty cells.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from risee import __version__
from risee import asymptotic as asy
from risee import crossover as cx
from risee.exact import ACTIVE, PASSIVE, MonteCarloError, monte_carlo
from risee.pa_opt import grid_argmax_beta, optimal_beta, taylor_ee, taylor_model
from risee.params import ConfigError, Scenario, dbm_to_watts, load_config, path_loss, validate

log = logging.getLogger("risee")

FIGURES = (
    "fig2_ee_vs_n", "fig3_ee_vs_pt", "fig4_ee_vs_sigmar", "fig5_ee_vs_sigmau",
    "fig6_ee_vs_beta", "fig7_solver_convergence", "fig8_f_vs_n",
)


@dataclasses.dataclass
class ExperimentSpec:
    figure: str
    grid: dict
    trials: int = 10_000
    seed: int = 0
    method: str = "all"
    workers: int = 1

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ConfigError(f"unknown figure {self.figure!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for key, values in self.grid.items():
            if len(values) == 0:
                raise ConfigError(f"empty grid for {key}")


def default_grid(figure: str) -> dict:
    if figure == "fig2_ee_vs_n":
        return {"n": [2 ** k for k in range(4, 14)]}
    if figure == "fig3_ee_vs_pt":
        return {"pt_dbm": list(np.arange(10.0, 100.5, 1.0)), "n": [64, 256, 1024]}
    if figure == "fig4_ee_vs_sigmar":
        return {"sigma_r_dbm": list(np.arange(-160.0, -39.5, 2.0)), "sigma_u_dbm": [-80.0, -70.0, -60.0]}
    if figure == "fig5_ee_vs_sigmau":
        return {"sigma_u_dbm": list(np.arange(-160.0, -39.5, 2.0)), "sigma_r_dbm": [-80.0, -70.0, -60.0]}
    if figure == "fig6_ee_vs_beta":
        return {"beta": list(np.linspace(0.0, 1.0, 101)), "pt_dbm": [20.0, 30.0, 40.0]}
    if figure == "fig7_solver_convergence":
        return {"method": list(cx.METHODS)}
    if figure == "fig8_f_vs_n":
        return {"n": [2.0 ** (k / 4) for k in range(16, 65)], "pt_dbm": [10.0, 20.0, 30.0]}
    raise ConfigError(f"unknown figure {figure!r}")


# ---------------------------------------------------------------------------
# formatting

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    return f"{v:.11e}" if math.isfinite(v) else ""


def render_csv(columns: list[str], rows: list[list], meta: dict) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key} = {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def scenario_meta(scenario: Scenario) -> dict:
    meta = {"tool": f"risee {__version__}"}
    for section, values in scenario.as_dict().items():
        for key, value in values.items():
            meta[f"{section}.{key}"] = repr(value) if isinstance(value, (tuple, list)) else value
    return meta


# ---------------------------------------------------------------------------
# figure sweeps; each returns (columns, rows, extra sidecar info)

def _ctx(scenario: Scenario, **changes):
    cfg = scenario.system.replace(**changes) if changes else scenario.system
    pl = path_loss(scenario.geometry)
    return cfg, asy.constants(pl, scenario.rayleigh, cfg), pl


def _safe(fn, *args):
    try:
        v = fn(*args)
    except (ValueError, ZeroDivisionError):
        return None
    v = getattr(v, "ee_bits_per_joule", v)
    return v if v is not None and math.isfinite(v) else None


def sweep_fig2(scenario: Scenario, spec: ExperimentSpec):
    cols = ["N", "ee_active_exact_mc", "stderr_active", "ee_active_asymptotic",
            "ee_passive_exact_mc", "stderr_passive", "ee_passive_asymptotic", "rel_gap_active"]
    rows = []
    for n in spec.grid["n"]:
        cfg, c, pl = _ctx(scenario, num_elements=int(n))
        asym_a = _safe(asy.ee_asymptotic_active, cfg, c)
        asym_p = _safe(asy.ee_asymptotic_passive, cfg, c)
        try:
            mc_a = monte_carlo(cfg, pl, scenario.rayleigh, ACTIVE, spec.trials, spec.seed, spec.workers)
            ee_a, se_a = mc_a.mean_ee, mc_a.std_err_ee
        except MonteCarloError as exc:
            log.warning("N=%d active: %s", n, exc)
            ee_a = se_a = None
        mc_p = monte_carlo(cfg, pl, scenario.rayleigh, PASSIVE, spec.trials, spec.seed, spec.workers)
        gap = abs(ee_a - asym_a) / asym_a if ee_a is not None and asym_a else None
        rows.append([int(n), ee_a, se_a, asym_a, mc_p.mean_ee, mc_p.std_err_ee, asym_p, gap])
    return cols, rows, {}


def sweep_fig3(scenario: Scenario, spec: ExperimentSpec):
    cols = ["N", "pt_dbm", "pt_w", "ee_active", "ee_passive"]
    rows = []
    for n in spec.grid["n"]:
        for p in spec.grid["pt_dbm"]:
            cfg, c, _ = _ctx(scenario, num_elements=int(n), total_power_w=float(dbm_to_watts(p)))
            rows.append([int(n), p, cfg.total_power_w, _safe(asy.ee_asymptotic_active, cfg, c),
                         _safe(asy.ee_asymptotic_passive, cfg, c)])
    return cols, rows, {}


def sweep_fig4(scenario: Scenario, spec: ExperimentSpec):
    cols = ["sigma_u_dbm", "sigma_r_dbm", "sigma_r_w", "ee_active", "ee_limit_sigma_r_zero"]
    rows = []
    for su in spec.grid["sigma_u_dbm"]:
        cfg, c, _ = _ctx(scenario, noise_user_w=float(dbm_to_watts(su)))
        coeffs = asy.sigma_r_coeffs(cfg, c)
        limit = _safe(asy.limit_sigma_r_zero, cfg, c)
        for sr in spec.grid["sigma_r_dbm"]:
            w = float(dbm_to_watts(sr))
            rows.append([su, sr, w, _safe(asy.ee_of_sigma_r, w, coeffs), limit])
    return cols, rows, {}


def sweep_fig5(scenario: Scenario, spec: ExperimentSpec):
    cols = ["sigma_r_dbm", "sigma_u_dbm", "sigma_u_w", "ee_active", "ee_limit_sigma_u_zero"]
    rows = []
    for sr in spec.grid["sigma_r_dbm"]:
        cfg, c, _ = _ctx(scenario, noise_ris_w=float(dbm_to_watts(sr)))
        coeffs = asy.sigma_u_coeffs(cfg, c)
        limit = _safe(asy.limit_sigma_u_zero, cfg, c)
        for su in spec.grid["sigma_u_dbm"]:
            w = float(dbm_to_watts(su))
            rows.append([sr, su, w, _safe(asy.ee_of_sigma_u, w, coeffs), limit])
    return cols, rows, {}


def beta_summary(cfg, c) -> dict:
    opt = optimal_beta(cfg, c)
    grid = grid_argmax_beta(cfg, c)
    return {
        "beta_opt": opt.beta,
        "ee_opt": opt.ee,
        "candidates": list(opt.candidates),
        "candidate_ee": list(opt.candidate_ee),
        "stationary_points": list(opt.stationary_points),
        "grid_argmax": grid,
        "gap_to_grid": abs(opt.beta - grid),
    }


def sweep_fig6(scenario: Scenario, spec: ExperimentSpec):
    cols = ["pt_dbm", "beta", "ee_active", "ee_taylor"]
    rows, extra = [], {"optimal_beta": {}}
    for p in spec.grid["pt_dbm"]:
        cfg, c, _ = _ctx(scenario, total_power_w=float(dbm_to_watts(p)))
        q = asy.beta_coeffs(cfg, c)
        model = taylor_model(q)
        for b in spec.grid["beta"]:
            rows.append([p, b, _safe(asy.ee_of_beta, b, q), _safe(taylor_ee, b, model)])
        extra["optimal_beta"][str(p)] = beta_summary(cfg, c)
    return cols, rows, extra


def solver_reports(scenario: Scenario, methods, seed: int) -> dict:
    cfg, c, _ = _ctx(scenario)
    m = cx.crossover_coeffs(cfg, c)
    out = {}
    for method in methods:
        if method == cx.NEWTON:
            out[method] = cx.solve_newton(m, tol=0.0, max_iter=12)
        elif method == cx.BISECTION:
            out[method] = cx.solve_bisection(m)
        else:
            out[method] = cx.solve_annealing(m, scenario.annealing, seed)
    return out


def sweep_fig7(scenario: Scenario, spec: ExperimentSpec):
    cols = ["method", "iteration", "alpha", "n_equivalent", "f", "abs_f"]
    methods = spec.grid["method"] if spec.method == "all" else [spec.method]
    rows, extra = [], {"iterations_to_1e-6": {}, "roots": {}}
    for method, rep in solver_reports(scenario, methods, spec.seed).items():
        for i, (a, fv) in enumerate(rep.trace, 1):
            rows.append([method, i, a, 1.0 / a, fv, abs(fv)])
        extra["iterations_to_1e-6"][method] = rep.iterations_to(1e-6)
        extra["roots"][method] = {"alpha": rep.alpha_root, "n0": rep.n_equivalent,
                                  "residual": rep.residual}
    return cols, rows, extra


def sweep_fig8(scenario: Scenario, spec: ExperimentSpec):
    cols = ["pt_dbm", "N", "f", "ee_active", "ee_passive", "ee_difference"]
    rows, extra = [], {"n0": {}}
    for p in spec.grid["pt_dbm"]:
        cfg, c, _ = _ctx(scenario, total_power_w=float(dbm_to_watts(p)))
        m = cx.crossover_coeffs(cfg, c)
        for n in spec.grid["n"]:
            ea, ep = cx.ee_active_of_n(n, m), cx.ee_passive_of_n(n, m)
            rows.append([p, n, cx.f_value(1.0 / n, m), ea, ep, ea - ep])
        try:
            extra["n0"][str(p)] = cx.crossover_n(cfg, c, cx.NEWTON).n0
        except cx.SolverError as exc:
            extra["n0"][str(p)] = None
            log.warning("Pt=%s dBm: %s", p, exc)
    return cols, rows, extra


SWEEPS = {
    "fig2_ee_vs_n": sweep_fig2,
    "fig3_ee_vs_pt": sweep_fig3,
    "fig4_ee_vs_sigmar": sweep_fig4,
    "fig5_ee_vs_sigmau": sweep_fig5,
    "fig6_ee_vs_beta": sweep_fig6,
    "fig7_solver_convergence": sweep_fig7,
    "fig8_f_vs_n": sweep_fig8,
}


def run(spec: ExperimentSpec, scenario: Scenario, out: Path | None = None) -> tuple[str, dict]:
    """Execute one figure sweep; write ``out`` and ``out.json`` if given.

    Returns the CSV text and the sidecar dictionary.
    """
    cfg, c, _ = _ctx(scenario)
    problems = validate(cfg, c)
    if problems:
        raise ConfigError("; ".join(problems))
    columns, rows, extra = SWEEPS[spec.figure](scenario, spec)
    meta = scenario_meta(scenario)
    meta.update({"figure": spec.figure, "seed": spec.seed, "trials": spec.trials})
    text = render_csv(columns, rows, meta)
    sidecar = {
        "tool": "risee", "version": __version__, "figure": spec.figure,
        "seed": spec.seed, "trials": spec.trials, "columns": columns,
        "grid": {k: [float(v) if not isinstance(v, str) else v for v in vals]
                 for k, vals in spec.grid.items()},
        "scenario": scenario.as_dict(),
        "results": extra,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        out.with_suffix(out.suffix + ".json").write_text(json.dumps(sidecar, indent=2, default=_json_default))
    return text, sidecar


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def report_optimal_beta(scenario: Scenario) -> dict:
    cfg, c, _ = _ctx(scenario)
    summary = beta_summary(cfg, c)
    summary["scenario"] = scenario.as_dict()
    return summary


def report_crossover(scenario: Scenario, methods, seed: int) -> dict:
    cfg, c, _ = _ctx(scenario)
    out = {}
    for method in methods:
        res = cx.crossover_n(cfg, c, method, scenario.annealing, seed)
        rep = res.report
        out[method] = {
            "alpha": rep.alpha_root, "n0": res.n0, "iterations": rep.iterations,
            "residual": rep.residual, "converged": rep.converged,
            "n_floor": rep.n_floor, "n_floor_better": res.side(rep.n_floor),
            "n_ceil": rep.n_ceil, "n_ceil_better": res.side(rep.n_ceil),
        }
    return out


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risee", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one figure sweep")
    p_run.add_argument("--figure", required=True, choices=FIGURES)
    p_run.add_argument("--config", type=Path, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--trials", type=int, default=10_000)
    p_run.add_argument("--out", type=Path, default=None, help="CSV path (stdout if omitted)")
    p_run.add_argument("--method", choices=list(cx.METHODS) + ["all"], default="all")
    p_run.add_argument("--workers", type=int, default=1)

    p_beta = sub.add_parser("beta", help="closed-form optimal PA factor")
    p_beta.add_argument("--config", type=Path, default=None)

    p_x = sub.add_parser("crossover", help="element count where active and passive EE meet")
    p_x.add_argument("--config", type=Path, default=None)
    p_x.add_argument("--method", choices=list(cx.METHODS) + ["all"], default="all")
    p_x.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        scenario = load_config(args.config)
        if args.command == "run":
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            spec = ExperimentSpec(args.figure, default_grid(args.figure), args.trials, args.seed,
                                  args.method, args.workers)
            text, _ = run(spec, scenario, args.out)
            if args.out is None:
                sys.stdout.write(text)
        elif args.command == "beta":
            print(json.dumps(report_optimal_beta(scenario), indent=2, default=_json_default))
        else:
            methods = cx.METHODS if args.method == "all" else (args.method,)
            print(json.dumps(report_crossover(scenario, methods, args.seed), indent=2))
    except (ConfigError, OSError, cx.SolverError) as exc:
        print(f"risee: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
