"""Sweep experiments written as CSV tables.

Every sweep point gets its own random stream derived from the master seed
and the point's global index, and rows are assembled in sweep order, so the
output does not depend on how many worker threads evaluated the points.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..aoi import average_aoi, violation_prob
from ..channel import Environment, dbm_to_mw, mw_to_dbm, stp, stp_inverse
from ..coverage import CorrelationParams, eta_coverage_probability, eta_threshold
from ..energy import (EnergyParams, avg_retransmissions, energy_at_power, min_feasible_stp,
                      optimize)
from ..errors import InfeasibleError
from ..sim import (AbstractMode, PhysicalMode, SimConfig, estimate_stats, run,
                   sample_slot_successes, trial_seed)
from .config import BaseParams, ExperimentSpec, Kind

COLUMNS = {
    Kind.AVG_AOI_SWEEP: ["series", "max_retx", "retx_interval", "link_distance", "pt_dbm",
                         "pt_mw", "p_s", "aoi_analytic", "aoi_sim", "rel_err"],
    Kind.VIOLATION_SWEEP: ["series", "max_retx", "link_distance", "pt_dbm", "pt_mw", "p_s",
                           "v_th", "violation_analytic", "violation_sim", "abs_err",
                           "coverage_analytic"],
    Kind.ENERGY_SWEEP: ["series", "max_retx", "pt_dbm", "pt_mw", "p_s", "n_bar",
                        "energy_analytic", "energy_sim", "feasible", "is_optimum"],
    Kind.OPTIMAL_POWER_VS_N: ["series", "max_retx", "v_th", "p_cov", "pt_cov_dbm", "s1", "s2",
                              "case", "p_star", "pt_star_mw", "pt_star_dbm", "energy_at_opt",
                              "energy_sim", "infeasible"],
    Kind.VALIDATE: ["check", "observed", "expected", "delta", "tolerance", "passed"],
}

FILENAMES = {
    Kind.AVG_AOI_SWEEP: "avg_aoi_sweep.csv",
    Kind.VIOLATION_SWEEP: "violation_sweep.csv",
    Kind.ENERGY_SWEEP: "energy_sweep.csv",
    Kind.OPTIMAL_POWER_VS_N: "optimal_power_vs_n.csv",
    Kind.VALIDATE: "validate.csv",
}


@dataclass
class ExperimentResult:
    kind: Kind
    path: Path
    rows: list[dict]
    ok: bool = True


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(value)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _threshold(bp: BaseParams) -> float:
    return bp.v_th_override if bp.v_th_override is not None else eta_threshold(bp.corr)


def _sim_run(p_s: float, bp: BaseParams, spec: ExperimentSpec, index: int,
             v_th: float | None = None):
    sp = bp.system
    if not p_s > 0:
        return None
    cfg = SimConfig(AbstractMode(p_s, sp.retx_interval, sp.tx_duration, sp.max_retx),
                    spec.periods, spec.seed, v_th)
    return run(cfg, trial_seed(spec.seed, index))


def _power_points(spec: ExperimentSpec):
    pts = []
    for s, (label, bp) in enumerate(spec.series()):
        for dbm in spec.sweep.points():
            pts.append((len(pts), s, label, bp, dbm))
    return pts


def avg_aoi_sweep(spec: ExperimentSpec, simulate: bool, jobs: int) -> list[dict]:
    def point(item):
        idx, _, label, bp, dbm = item
        sp = bp.system
        p_t = dbm_to_mw(dbm)
        p_s = stp(sp, bp.env, p_t)
        T_R, T_o, N = sp.retx_interval, sp.tx_duration, sp.max_retx
        analytic = average_aoi(p_s, T_R, T_o, N) if p_s > 0 else math.inf
        row = dict(series=label, max_retx=N, retx_interval=T_R,
                   link_distance=sp.link_distance, pt_dbm=dbm, pt_mw=p_t, p_s=p_s,
                   aoi_analytic=analytic)
        if simulate:
            r = _sim_run(p_s, bp, spec, idx)
            if r is not None and r.time_horizon > 0:
                sim = estimate_stats(r).avg_aoi
                row.update(aoi_sim=sim, rel_err=abs(sim - analytic) / analytic)
        return row

    return _map(point, _power_points(spec), jobs)


def violation_sweep(spec: ExperimentSpec, simulate: bool, jobs: int) -> list[dict]:
    def point(item):
        idx, _, label, bp, dbm = item
        sp = bp.system
        p_t = dbm_to_mw(dbm)
        p_s = stp(sp, bp.env, p_t)
        T_R, T_o, N = sp.retx_interval, sp.tx_duration, sp.max_retx
        v_th = _threshold(bp)
        analytic = violation_prob(p_s, v_th, T_R, T_o, N) if p_s > 0 else 1.0
        cov = (eta_coverage_probability(bp.corr, p_s, T_R, T_o, N, v_th=v_th)
               if p_s > 0 else 0.0)
        row = dict(series=label, max_retx=N, link_distance=sp.link_distance, pt_dbm=dbm,
                   pt_mw=p_t, p_s=p_s, v_th=v_th, violation_analytic=analytic,
                   coverage_analytic=cov)
        if simulate:
            r = _sim_run(p_s, bp, spec, idx, v_th)
            if r is not None and r.time_horizon > 0:
                sim = estimate_stats(r, v_th=v_th).violation
                row.update(violation_sim=sim, abs_err=abs(sim - analytic))
        return row

    return _map(point, _power_points(spec), jobs)


def energy_sweep(spec: ExperimentSpec, simulate: bool, jobs: int) -> list[dict]:
    p_cov = {}
    for label, bp in spec.series():
        sp = bp.system
        try:
            p_cov[label] = min_feasible_stp(bp.corr, sp.retx_interval, sp.tx_duration,
                                            sp.max_retx, bp.v_th_override)
        except InfeasibleError:
            p_cov[label] = None

    def point(item):
        idx, _, label, bp, dbm = item
        sp = bp.system
        p_t = dbm_to_mw(dbm)
        p_s = stp(sp, bp.env, p_t)
        n_bar = avg_retransmissions(p_s, sp.max_retx) if p_s > 0 else float(sp.max_retx)
        energy = energy_at_power(p_t, bp.energy, bp.env)
        feasible = p_cov[label] is not None and p_s >= p_cov[label]
        row = dict(series=label, max_retx=sp.max_retx, pt_dbm=dbm, pt_mw=p_t, p_s=p_s,
                   n_bar=n_bar, energy_analytic=energy, feasible=feasible, is_optimum=False)
        if simulate:
            r = _sim_run(p_s, bp, spec, idx)
            if r is not None:
                row["energy_sim"] = _sim_energy(r, p_t, bp.energy.sensing_energy)
        return row

    rows = _map(point, _power_points(spec), jobs)
    for label, _ in spec.series():
        cands = [r for r in rows if r["series"] == label and r["feasible"]]
        if cands:
            min(cands, key=lambda r: r["energy_analytic"])["is_optimum"] = True
    return rows


def _sim_energy(r, tx_power: float, sensing_energy: float) -> float:
    return (sensing_energy * r.periods + r.transmissions * tx_power * r.tx_duration) / (
        r.periods * r.max_retx
    )


def optimal_power_vs_n(spec: ExperimentSpec, simulate: bool, jobs: int) -> list[dict]:
    items = []
    for s, (label, bp) in enumerate(spec.series()):
        for n in spec.sweep.points():
            items.append((len(items), label, bp, int(round(n))))

    def point(item):
        idx, label, bp, n = item
        sp = bp.system.replace(max_retx=n)
        ep = EnergyParams(sp, bp.energy.sensing_energy)
        v_th = _threshold(bp)
        row = dict(series=label, max_retx=n, v_th=v_th, infeasible=False)
        try:
            res = optimize(ep, bp.corr, bp.env, bp.v_th_override)
        except InfeasibleError:
            row["infeasible"] = True
            return row
        st = res.stationary or (None, None)
        row.update(p_cov=res.p_cov, pt_cov_dbm=mw_to_dbm(stp_inverse(res.p_cov, sp, bp.env)),
                   s1=st[0], s2=st[1], case=res.case, p_star=res.p_star,
                   pt_star_mw=res.p_t_star, pt_star_dbm=mw_to_dbm(res.p_t_star),
                   energy_at_opt=res.energy_at_opt)
        if simulate:
            r = _sim_run(res.p_star, BaseParams(sp, bp.corr, ep, bp.env, bp.v_th_override),
                         spec, idx)
            row["energy_sim"] = _sim_energy(r, res.p_t_star, ep.sensing_energy)
        return row

    return _map(point, items, jobs)


def validate(spec: ExperimentSpec, simulate: bool, jobs: int) -> list[dict]:
    """Analytical-vs-simulated agreement checks at the configured period count."""
    checks = []
    periods = spec.periods

    def add(name, observed, expected, tol, relative=False):
        delta = abs(observed - expected)
        if relative:
            delta /= abs(expected)
        checks.append(dict(check=name, observed=observed, expected=expected, delta=delta,
                           tolerance=tol, passed=bool(delta <= tol)))

    ep = EnergyParams(spec.base.system.replace(max_retx=9), 1.0)
    res = optimize(ep, CorrelationParams(1.76e-2, 1.2e-3, 0.1, 0.6, 0.6),
                   Environment.NOISE_LIMITED)
    add("optimal_power_dbm_N9_noise_limited", mw_to_dbm(res.p_t_star), -5.18, 0.3)
    for n, tr, expect in [(10, 1.0, 6.0), (5, 2.0, 6.0), (20, 1.0, 11.0), (10, 2.0, 11.0)]:
        add(f"avg_aoi_p1_N{n}_TR{tr:g}", average_aoi(1.0, tr, 1.0, n), expect, 1e-12)
    if not simulate:
        return checks

    abstract = [(0.3, 5), (0.5, 10), (0.8, 20)]
    def sim_point(item):
        i, (p, n) = item
        v_th = [0.7 * n, n + 1.5]
        cfg = SimConfig(AbstractMode(p, 1.0, 1.0, n), periods, spec.seed, v_th)
        return p, n, v_th, run(cfg, trial_seed(spec.seed, i))

    for p, n, v_th, r in _map(sim_point, list(enumerate(abstract)), jobs):
        st = estimate_stats(r)
        add(f"avg_aoi_p{p:g}_N{n}", st.avg_aoi, average_aoi(p, 1.0, 1.0, n), 0.01, True)
        for v in v_th:
            add(f"violation_p{p:g}_N{n}_v{v:g}", r.violated(v) / r.time_horizon,
                violation_prob(p, v, 1.0, 1.0, n), 0.005)
        add(f"n_bar_p{p:g}_N{n}", r.transmissions / r.periods, avg_retransmissions(p, n),
            0.01, True)

    # moderate power keeps the PPP sampler fast while p_s stays away from 0 and 1
    sp = spec.base.system.with_power(20.0)
    p_model = stp(sp, Environment.GENERAL)
    if 0.0 < p_model < 1.0:
        mode = PhysicalMode(sp)
        rng = np.random.default_rng(trial_seed(spec.seed, len(abstract)))
        ok = sample_slot_successes(mode, periods, rng)
        half = 2.5758293035489004 * math.sqrt(p_model * (1 - p_model) / periods)
        add("physical_stp_in_99ci", float(ok.mean()), p_model, half)
    return checks


RUNNERS = {
    Kind.AVG_AOI_SWEEP: avg_aoi_sweep,
    Kind.VIOLATION_SWEEP: violation_sweep,
    Kind.ENERGY_SWEEP: energy_sweep,
    Kind.OPTIMAL_POWER_VS_N: optimal_power_vs_n,
    Kind.VALIDATE: validate,
}


def run_experiment(spec: ExperimentSpec, output: str | Path = ".", simulate: bool = True,
                   jobs: int = 1) -> ExperimentResult:
    """Evaluate ``spec`` and write its CSV into ``output``."""
    out_dir = Path(output)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = RUNNERS[spec.kind](spec, simulate, jobs)
    path = out_dir / FILENAMES[spec.kind]
    write_csv(path, COLUMNS[spec.kind], rows)
    ok = all(r["passed"] for r in rows) if spec.kind is Kind.VALIDATE else True
    return ExperimentResult(spec.kind, path, rows, ok)
