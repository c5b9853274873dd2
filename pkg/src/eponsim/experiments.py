"""Row builders behind the CLI subcommands.

Each function returns plain dicts (one per output row) so the CLI only deals
with serialization.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Optional

from . import delay as delay_mod
from .model import (
    SystemParams,
    attempt_probability,
    attempt_probability_approx,
    attempt_probability_exact,
    check_regime,
    solve_stationary,
    stationary_from_root,
)
from .simulator import SimConfig, SimTrace, run, run_replications
from .stability import (
    Region,
    characteristic_roots,
    classify,
    critical_omegas,
    omega_m1_for_h,
    strict_stability_necessary,
    strict_stability_sharp,
)
from .special import lambert_w0

FIG7_PANELS = {
    "a": (38e-6, (0.0, 0.6)),
    "b": (300e-6, (0.6996,)),
    "c": (320e-6, (0.0, 0.6)),
}
FIG7B_SEEDS = 20


def _params_dict(params: SystemParams) -> dict:
    d = dataclasses.asdict(params)
    d["slot"] = params.slot
    d["window"] = params.window
    return d


def analyze_document(params: SystemParams, exact_h: bool = True) -> dict:
    """Stability report, stationary points and delay estimates for one parameter set."""
    h = attempt_probability(params, exact_h)
    report = classify(params, h)
    diagnostics = check_regime(params, h)
    roots = []
    for dist in solve_stationary(params, h):
        entry = dataclasses.asdict(dist)
        if dist.role != "u":
            entry["delay"] = dataclasses.asdict(delay_mod.mean_delay(params, dist, h))
        roots.append(entry)
    bounds = None
    if report.region is Region.STABLE:
        bounds = {"lower": report.pi_r_lower, "upper": report.pi_r_upper}
    return {
        "params": _params_dict(params),
        "h_mode": "exact" if exact_h else "approx",
        "h": h,
        "h_exact": attempt_probability_exact(params),
        "h_approx": attempt_probability_approx(params),
        "alpha": report.alpha,
        "omega0": report.omega0,
        "omega_m1": report.omega_m1,
        "region": report.region.value,
        "strictly_stable": report.strictly_stable,
        "strict_threshold": report.strict_threshold,
        "x0": report.x0,
        "x1": report.x1,
        "f_x0": report.f_x0,
        "f_x1": report.f_x1,
        "roots": roots,
        "bounds": bounds,
        "delay_bound": delay_mod.delay_bound(params),
        "regime": dataclasses.asdict(diagnostics),
    }


def _by_role(params: SystemParams, h: float) -> dict[str, object]:
    return {d.role: d for d in (stationary_from_root(r.pi_r, params, r.role, r.multiplicity)
                                for r in characteristic_roots(params, h))}


def fig6_rows(params: SystemParams, omegas: Iterable[float], exact_h: bool = True) -> list[dict]:
    h = attempt_probability(params, exact_h)
    rows = []
    for omega in omegas:
        roles = _by_role(params.with_wait(omega), h)
        row = {"omega": omega}
        for role in ("d", "u", "s"):
            row[f"root_{role}"] = roles[role].pi_r if role in roles else None
        for role in ("d", "s"):
            row[f"lambda_out_{role}"] = roles[role].lambda_out if role in roles else None
        rows.append(row)
    return rows


def sweep_omega_rows(params: SystemParams, omegas: Iterable[float], exact_h: bool = True) -> list[dict]:
    h = attempt_probability(params, exact_h)
    om0, om1 = critical_omegas(params, h)
    rows = []
    for omega in omegas:
        p = params.with_wait(omega)
        report = classify(p, h)
        roles = _by_role(p, h)
        row = {"omega": omega, "region": report.region.value, "n_roots": len(report.roots),
               "omega0": om0, "omega_m1": om1}
        for role in ("d", "u", "s"):
            dist = roles.get(role)
            row[f"root_{role}"] = dist.pi_r if dist else None
            row[f"lambda_out_{role}"] = dist.lambda_out if dist else None
        low = roles.get("d")
        est = delay_mod.mean_delay(p, low, h) if low else None
        row["e_d"] = est.mean_total if est else None
        row["eta"] = est.efficiency if est else None
        rows.append(row)
    return rows


def _minus_w0(h: float) -> float:
    return -lambert_w0(-math.e * h).value


def sweep_h_rows(params: SystemParams, hs: Iterable[float]) -> list[dict]:
    rows = []
    for h in hs:
        om0, om1 = critical_omegas(params, h)
        w = _minus_w0(h)
        rows.append({
            "h": h,
            "omega0": om0,
            "omega_m1": om1,
            "pi_r_lower": h / (1.0 + h),
            "pi_r_upper": w / (1.0 + w),
            "minus_alpha": math.e * h,
            "strict_necessary": strict_stability_necessary(h),
            "strict_sharp": strict_stability_sharp(h),
        })
    return rows


def fig8_rows(params: SystemParams, hs: Iterable[float]) -> list[dict]:
    return [{"h": h, "omega_m1": omega_m1_for_h(h, params.req_len, params.n_onus)} for h in hs]


def fig9_rows(params: SystemParams, hs: Iterable[float], omega_factor: float = 1.0) -> list[dict]:
    """Low root at the minimal stable waiting time omega = omega_factor * omega_{-1}(h)."""
    rows = []
    for h in hs:
        om1 = omega_m1_for_h(h, params.req_len, params.n_onus)
        roots = characteristic_roots(params.with_wait(omega_factor * om1), h)
        w = _minus_w0(h)
        rows.append({
            "h": h,
            "pi_r": roots[0].pi_r,
            "lower_bound": h / (1.0 + h),
            "upper_bound": w / (1.0 + w),
            "minus_alpha": math.e * h,
        })
    return rows


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _run_job(job) -> SimTrace:
    config, replication = job
    return run(config, replication)


def fig11_rows(
    params: SystemParams,
    omegas: Iterable[float],
    sim: SimConfig,
    exact_h: bool = True,
    workers: int = 1,
) -> list[dict]:
    h = attempt_probability(params, exact_h)
    omegas = list(omegas)
    jobs = []
    for omega in omegas:
        cfg = dataclasses.replace(sim, params=params.with_wait(omega))
        jobs.extend((cfg, r) for r in range(sim.replications))
    traces = _map(_run_job, jobs, workers)
    rows = []
    for i, omega in enumerate(omegas):
        p = params.with_wait(omega)
        low = solve_stationary(p, h)[0]
        est = delay_mod.mean_delay(p, low, h)
        states = [t.steady_state for t in traces[i * sim.replications:(i + 1) * sim.replications]]
        states = [s for s in states if s is not None]
        rows.append({
            "omega": omega,
            "e_d_analytic": est.mean_total,
            "e_d_sim": _mean(s.mean_delay_hat for s in states),
            "eta_analytic": est.efficiency,
            "eta_sim": _mean(s.efficiency_hat for s in states),
        })
    return rows


def _mean(values) -> Optional[float]:
    values = [v for v in values if not math.isnan(v)]
    return sum(values) / len(values) if values else None


def simulate(sim: SimConfig, workers: int = 1) -> list[SimTrace]:
    return run_replications(sim, workers)


def fig7_runs(sim: SimConfig, panels: str = "abc", workers: int = 1) -> list[tuple[str, float, SimTrace]]:
    """(panel, init fraction, trace) for the three waiting-time regimes.

    Panel ``b`` repeats its single initial condition over ``FIG7B_SEEDS``
    replications unless ``sim.replications`` asks for more.
    """
    jobs, labels = [], []
    for panel in panels:
        omega, inits = FIG7_PANELS[panel]
        reps = max(sim.replications, FIG7B_SEEDS) if panel == "b" else sim.replications
        for init in inits:
            cfg = dataclasses.replace(sim, params=sim.params.with_wait(omega),
                                      init_fraction_r=init, replications=reps)
            for r in range(reps):
                jobs.append((cfg, r))
                labels.append((panel, init))
    traces = _map(_run_job, jobs, workers)
    return [(panel, init, trace) for (panel, init), trace in zip(labels, traces)]


def trace_rows(trace: SimTrace) -> list[dict]:
    pw = trace.per_window
    n = trace.config.params.n_onus
    return [
        {"window_index": int(w), "time_s": float(t), "frac_r": int(c) / n,
         "n_attempts": int(a), "n_successes": int(s)}
        for w, t, c, a, s in zip(pw["window_index"], pw["time"], pw["count_r"],
                                 pw["n_attempts"], pw["n_successes"])
    ]


def summary_row(trace: SimTrace) -> dict:
    ss = trace.steady_state
    tail = trace.frac_r[-max(1, trace.per_window.size // 10):]
    return {
        "pi_r_hat": ss.pi_r_hat if ss else None,
        "se": ss.pi_r_se if ss else None,
        "lambda_out_hat": ss.lambda_out_hat if ss else None,
        "mean_delay_s": ss.mean_delay_hat if ss else None,
        "mean_residual_s": ss.mean_residual_hat if ss else None,
        "efficiency_hat": ss.efficiency_hat if ss else None,
        "seed": trace.config.seed,
        "replications": trace.config.replications,
        "replication": trace.replication,
        "final_frac_r": float(tail.mean()),
    }
