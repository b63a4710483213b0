"""Scenario runners behind the command-line interface.

Every random draw comes from a ``SeedSequence`` keyed by the master seed and
the cell it belongs to, so a cell's numbers do not depend on which other
cells run or in what order. Canonical CSVs carry no timing data; wall-clock
times go to a ``*_timings.csv`` sidecar.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import bounds as B
from ..attacks import (
    AttackSpec,
    assemble,
    gen_ground_truth_gaussian,
    mass_attack,
    split_rmse,
    targeted_attack,
)
from ..errors import RankDeficiencyError
from ..factor import als_solve
from ..matcore import (
    ObservedMatrix,
    ProblemShape,
    SampleSet,
    read_triplets,
    rmse,
    sample_uniform,
    write_dense,
)
from ..subgeo import (
    canonical_angles,
    coherence_mu0,
    column_space,
    complete_column,
    condition_number,
    orthonormalize,
    projection_distance,
    restricted_sigma_min,
    sin_theta_norm,
    Subspace,
)
from .config import ExperimentConfig
from .svg import line_chart

logger = logging.getLogger(__name__)

# stream tags for SeedSequence keys
_Y, _NOISE, _OMEGA, _TARGETED, _MASS, _INIT, _USERS, _SUITE, _ROWS = range(1, 10)

FIGURE_COLUMNS = [
    "scenario", "model", "seed", "n_e", "rmse_total", "rmse_Y", "rmse_E",
    "rho_spectral", "sigma_min", "delta", "thm1_rhs", "thm1_satisfied",
    "iterations", "converged", "flagged",
]
ORACLE_COLUMNS = [
    "scenario", "seed", "m", "n", "r", "p", "noise_sigma", "rmse_oracle",
    "predicted", "ratio", "rmse_vs_truth", "degenerate_columns",
]
SIGMA_COLUMNS = [
    "scenario", "seed", "p", "m", "r", "observed_rows", "sigma_min",
    "sigma_min_over_sqrt_p", "prop2_rhs", "prop2_satisfied", "coherence_mu0",
]

# reports that follow from matrix perturbation theory alone
DETERMINISTIC = ("thm3_", "weyl", "eq5_", "thm4_")


def _ss(seed, *key):
    return np.random.SeedSequence([int(seed), *(int(k) for k in key)])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def ground_truth(cfg: ExperimentConfig, seed, m=None, n=None, r=None):
    """Gaussian-product ratings, rescaled so that ``max |Y| = k`` if requested."""
    m, n, r = m or cfg.m, n or cfg.n, r or cfg.r
    Y = gen_ground_truth_gaussian(m, n, r, cfg.gt_scale, _ss(seed, _Y, m, n, r))
    if cfg.normalize_to_k:
        Y *= cfg.k / np.abs(Y).max()
    return Y


def is_deterministic(report) -> bool:
    if report.name.startswith(DETERMINISTIC):
        return True
    return report.name == "thm1_chain" and report.inputs.get("eligible") is True


# ---------------------------------------------------------------- figures

def _attack_cell(cfg, seed, n_e, model, Y, N_gnd):
    m, n = Y.shape
    spec = AttackSpec(model, n_e, cfg.n_push, cfg.n_nuke, cfg.k)
    if model == "targeted":
        E = targeted_attack(Y, spec, _ss(seed, _TARGETED, n_e))
    else:
        E = mass_attack(m, spec, _ss(seed, _MASS, n_e))
    ds = assemble(Y, E, N_gnd)
    cols = n + n_e
    # noise and sample set depend only on (seed, n_e): both attack models see the same ones
    noise = cfg.noise_sigma * np.random.default_rng(_ss(seed, _NOISE, n_e)).standard_normal((m, cols))
    omega = sample_uniform((m, cols), round(cfg.sampling_rate * m * cols), _ss(seed, _OMEGA, n_e))
    k_eff = max(cfg.k, float(np.abs(ds.ground_truth).max()))
    obs = ObservedMatrix(ds.combined + noise, omega, k_eff)
    row = dict(scenario="", model=model, seed=seed, n_e=n_e)
    try:
        sol = als_solve(obs, cfg.r, cfg.solver, _ss(seed, _INIT, n_e))
    except RankDeficiencyError as exc:
        logger.warning("seed %s n_e %s %s: %s", seed, n_e, model, exc)
        nan = math.nan
        row.update(rmse_total=nan, rmse_Y=nan, rmse_E=nan, rho_spectral=nan,
                   sigma_min=nan, delta=nan, thm1_rhs=nan, thm1_satisfied=False,
                   iterations=0, converged=False, flagged=True)
        return row
    Ys = sol.completion()
    total = rmse(Ys, ds.ground_truth)
    ry, re = split_rmse(Ys, ds)
    N_star = column_space(Ys, cfg.r)
    rho = sin_theta_norm(canonical_angles(N_gnd, N_star), "spectral")
    by_col = _observed_rows_by_column(omega)
    smins = [restricted_sigma_min(N_star, rows) for rows in by_col[:n] if rows.size]
    delta = float(np.linalg.svd(Ys, compute_uv=False)[cfg.r - 1])
    shape = ProblemShape(m, cols, cfg.r, omega.rate)
    rhs = B.thm1_rhs(ds.orthogonal_part + noise, omega, shape, k_eff, cfg.constants)
    row.update(rmse_total=total, rmse_Y=ry, rmse_E=re, rho_spectral=rho,
               sigma_min=float(np.median(smins)) if smins else 0.0, delta=delta,
               thm1_rhs=rhs, thm1_satisfied=bool(total <= rhs + B.REPORT_TOL),
               iterations=sol.iterations, converged=sol.converged, flagged=False)
    return row


def _run_attack_grid(cfg, models, scenario):
    rows, timings = [], []
    for seed in cfg.seeds:
        Y = ground_truth(cfg, seed)
        N_gnd = column_space(Y, cfg.r)
        for n_e in cfg.attacker_counts:
            for model in models:
                t0 = time.perf_counter()
                row = _attack_cell(cfg, seed, n_e, model, Y, N_gnd)
                row["scenario"] = scenario
                rows.append(row)
                timings.append(dict(scenario=scenario, model=model, seed=seed, n_e=n_e,
                                    wall_time_ms=round(1e3 * (time.perf_counter() - t0), 3)))
                logger.info("%s seed=%s n_e=%s %s rmse=%.4g", scenario, seed, n_e, model,
                            row["rmse_total"])
    return rows, timings


def _means(rows, key, model):
    out = {}
    for row in rows:
        if row["model"] != model or str(row["flagged"]) in ("true", "True"):
            continue
        out.setdefault(int(row["n_e"]), []).append(float(row[key]))
    xs = sorted(out)
    return xs, [float(np.mean(out[x])) for x in xs]


def plot_figure1(csv_path, svg_path):
    rows = read_csv(csv_path)
    series = {f"{model} attack": _means(rows, "rmse_total", model)
              for model in ("targeted", "mass")}
    line_chart(svg_path, series, title="RMSE under targeted and mass attacks",
               xlabel="number of attackers n_e", ylabel="mean RMSE")


def plot_figure2(csv_path, svg_path):
    rows = read_csv(csv_path)
    series = {"RMSE_Y": _means(rows, "rmse_Y", "mass")}
    xs, ys = _means(rows, "rmse_E", "mass")
    series["RMSE_E"] = ([x for x in xs if x > 0], [y for x, y in zip(xs, ys) if x > 0])
    line_chart(svg_path, series, title="RMSE_Y and RMSE_E under mass attack",
               xlabel="number of attackers n_e", ylabel="mean RMSE")


def _emit(cfg, name, columns, rows, timings=None):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    write_csv(path, columns, rows)
    if timings is not None:
        write_csv(out / f"{name}_timings.csv",
                  ["scenario", "model", "seed", "n_e", "wall_time_ms"], timings)
    return path


def run_figure1(cfg: ExperimentConfig):
    """Targeted vs mass attack sweep; writes ``figure1.csv`` and ``figure1.svg``."""
    rows, timings = _run_attack_grid(cfg, ("targeted", "mass"), "figure1")
    path = _emit(cfg, "figure1", FIGURE_COLUMNS, rows, timings)
    plot_figure1(path, path.with_suffix(".svg"))
    return rows


def run_figure2(cfg: ExperimentConfig):
    """Mass-attack sweep split into honest and attacker RMSE."""
    rows, timings = _run_attack_grid(cfg, ("mass",), "figure2")
    path = _emit(cfg, "figure2", FIGURE_COLUMNS, rows, timings)
    plot_figure2(path, path.with_suffix(".svg"))
    return rows


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class ConstantFit:
    """Smallest RMSE-bound constant over the eligible trials.

    ``C`` may be negative or zero: the first two terms alone already cover the
    measured RMSE, and any non-negative constant works.
    """

    C: float
    used: int
    excluded: int


def fit_thm1_constant(trials) -> ConstantFit:
    """Invert the RMSE bound: ``max (rmse - sampled - full) / term``.

    ``trials`` are dicts with keys ``rmse``, ``sampled``, ``full``, ``term``
    and ``eligible``. Trials where the solver ended worse than the ground
    truth on the sampled entries are excluded, since the bound only speaks
    about the global optimum.
    """
    vals = [(t["rmse"] - t["sampled"] - t["full"]) / t["term"]
            for t in trials if t["eligible"]]
    excluded = sum(1 for t in trials if not t["eligible"])
    return ConstantFit(max(vals) if vals else math.nan, len(vals), excluded)


def noisy_instance(cfg: ExperimentConfig, seed, m=None, n=None, p=None, sigma=None):
    """Ground truth, noise, sample set and ALS solution for one seed."""
    m, n = m or cfg.m, n or cfg.n
    p = cfg.sampling_rate if p is None else p
    sigma = cfg.noise_sigma if sigma is None else sigma
    Y = ground_truth(cfg, seed, m, n)
    E = sigma * np.random.default_rng(_ss(seed, _NOISE, m, n)).standard_normal((m, n))
    omega = sample_uniform((m, n), round(p * m * n), _ss(seed, _OMEGA, m, n, round(p * 1e6)))
    obs = ObservedMatrix(Y + E, omega, cfg.k)
    sol = als_solve(obs, cfg.r, cfg.solver, _ss(seed, _INIT, m, n))
    Ys = sol.completion()
    # global-optimum proxy: the solution fits the samples at least as well as the truth
    truth_obj = 0.5 * float(np.sum(E.ravel()[omega.linear] ** 2))
    eligible = sol.final_objective <= truth_obj * (1 + 1e-12) + 1e-20
    shape = ProblemShape(m, n, cfg.r, omega.rate)
    k_eff = max(cfg.k, float(np.abs(Ys).max()))
    sampled, full, term = B.thm1_terms(E, omega, shape, k_eff)
    trial = dict(rmse=rmse(Ys, Y), sampled=sampled, full=full, term=term,
                 eligible=bool(eligible), tau=B.tau_omega(Y + E, Ys, omega), k=k_eff)
    return dict(Y=Y, E=E, omega=omega, obs=obs, sol=sol, Ys=Ys, shape=shape, trial=trial)


def eq5_suite(trials, m=60, r=6, seed=0):
    """Projector distance vs sin-Theta identities on random subspace pairs."""
    rng = np.random.default_rng(_ss(seed, _SUITE, 5))
    out = []
    for t in range(trials):
        A = orthonormalize(rng.standard_normal((m, r)))
        Bs = orthonormalize(rng.standard_normal((m, r)))
        ang = canonical_angles(A, Bs)
        fro = abs(projection_distance(A, Bs, "frobenius") - math.sqrt(2) * sin_theta_norm(ang, "frobenius"))
        spec = abs(projection_distance(A, Bs, "spectral") - sin_theta_norm(ang, "spectral"))
        out.append(B.BoundReport("eq5_frobenius", fro, 0.0, {"trial": t}))
        out.append(B.BoundReport("eq5_spectral", spec, 0.0, {"trial": t}))
    return out


def weyl_suite(trials, m=80, n=100, seed=0):
    rng = np.random.default_rng(_ss(seed, _SUITE, 1))
    out = []
    for t in range(trials):
        A = rng.standard_normal((m, n))
        D = rng.standard_normal((m, n)) * rng.uniform(0.01, 2.0)
        rep = B.weyl_check(A, D)
        out.append(B.BoundReport(rep.name, rep.lhs, rep.rhs, {**rep.inputs, "trial": t}))
    return out


def thm3_suite(trials, m=80, n=100, r=5, rel=0.1, seed=0):
    """Random rank-r truths with rank-r perturbations of spectral size ``rel * sigma_r``."""
    rng = np.random.default_rng(_ss(seed, _SUITE, 3))
    out = []
    for t in range(trials):
        Y = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
        D = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
        s_r = np.linalg.svd(Y, compute_uv=False)[r - 1]
        D *= rel * s_r / np.linalg.svd(D, compute_uv=False)[0]
        for rep in B.thm3_report(Y, Y + D, r):
            out.append(B.BoundReport(rep.name, rep.lhs, rep.rhs, {**rep.inputs, "trial": t},
                                     tol=max(B.REPORT_TOL, 1e-8 * rep.rhs)))
    return out


def _observed_rows_by_column(omega: SampleSet):
    order = np.argsort(omega.cols, kind="stable")
    rows = omega.rows[order]
    bounds = np.searchsorted(omega.cols[order], np.arange(omega.shape[1] + 1))
    return [rows[bounds[j]:bounds[j + 1]] for j in range(omega.shape[1])]


def thm4_reports(N_gnd: Subspace, N_star: Subspace, Y, Y_hat, omega, users, seed):
    """Per-user prediction bounds, in-subspace and out-of-subspace."""
    rho = sin_theta_norm(canonical_angles(N_gnd, N_star), "spectral")
    by_col = _observed_rows_by_column(omega)
    out = []
    for j in users:
        rows = by_col[j]
        if rows.size == 0:
            continue
        smin = restricted_sigma_min(N_star, rows)
        if smin <= 0:
            continue
        y = Y[:, j]
        pred = complete_column(N_star, rows, y[rows])
        params = {"seed": seed, "user": int(j), "rho": rho, "sigma_min": smin}
        out.append(B.BoundReport("thm4_in_subspace", float(np.linalg.norm(pred - y)),
                                 B.thm4_bound(rho, smin, float(np.linalg.norm(y))), params))
        yn = Y_hat[:, j]
        y_gnd = N_gnd.project(yn)
        perp = float(np.linalg.norm(yn - y_gnd))
        pred = complete_column(N_star, rows, yn[rows])
        out.append(B.BoundReport("thm4_out_of_subspace", float(np.linalg.norm(pred - y_gnd)),
                                 B.thm4_bound(rho, smin, float(np.linalg.norm(yn)), perp), params))
    return out


def _attack_bound_reports(cfg, seed, inst):
    """Attack-bound values on one targeted and one mass instance."""
    Y, m, n = inst["Y"], cfg.m, cfg.n
    n_e = max(1, n // 10)
    N_gnd = column_space(Y, cfg.r)
    # both attack bounds speak about the box-constrained estimate
    boxed = cfg.with_overrides(box_mode="clip-final")
    out = []
    for model in ("targeted", "mass"):
        row = _attack_cell(boxed, seed, n_e, model, Y, N_gnd)
        if row["flagged"]:
            continue
        size = round(cfg.sampling_rate * m * (n + n_e))
        params = {"seed": seed, "n_e": n_e}
        if model == "targeted":
            rhs = B.prop3_rhs(cfg.n_push + cfg.n_nuke, n_e, size, n, cfg.r, cfg.k, cfg.constants)
            out.append(B.BoundReport("prop3", row["rmse_total"], rhs, params))
        else:
            kappa = condition_number(Y, cfg.r)
            hy, he = B.prop4_rhs(kappa, cfg.k, cfg.r, cfg.sampling_rate, max(n, m), cfg.constants)
            out.append(B.BoundReport("prop4_honest", row["rmse_Y"], hy, {**params, "kappa": kappa}))
            out.append(B.BoundReport("prop4_attackers", row["rmse_E"], he, {**params, "kappa": kappa}))
    return out


def run_bound_suite(cfg: ExperimentConfig, write=True):
    """All bound reports for the configured instances plus a fit of the RMSE-bound constant.

    Returns ``(reports, fit)``.
    """
    reports, trials = [], []
    for seed in cfg.seeds:
        inst = noisy_instance(cfg, seed)
        Y, E, omega, Ys, shape, trial = (inst[k] for k in ("Y", "E", "omega", "Ys", "shape", "trial"))
        trials.append(trial)
        Yh = Y + E
        k_eff = trial["k"]
        params = {"seed": seed, "m": cfg.m, "n": cfg.n, "r": cfg.r, "p": cfg.sampling_rate}
        reports.append(B.BoundReport("thm1_unit_C", trial["rmse"],
                                     B.thm1_rhs(E, omega, shape, k_eff, cfg.constants), params))
        reports.append(B.BoundReport(
            "thm1_chain", trial["rmse"],
            trial["sampled"] + trial["tau"] + trial["full"], {**params, "eligible": trial["eligible"]}))
        reports.append(B.BoundReport("tau_omega", trial["tau"],
                                     B.thm2_rhs(shape, k_eff, len(omega), cfg.constants), params))
        reports.append(B.BoundReport("stablemc", trial["rmse"], B.stablemc_rhs(E, omega, shape), params))
        try:
            kappa = condition_number(Y, cfg.r)
            reports.append(B.BoundReport("optspace", trial["rmse"],
                                         B.optspace_rhs(E, omega, shape, kappa, cfg.constants),
                                         {**params, "kappa": kappa}))
        except RankDeficiencyError:
            pass
        try:
            reports.extend(B.BoundReport(r.name, r.lhs, r.rhs, {**r.inputs, **params})
                           for r in B.thm3_report(Y, Ys, cfg.r))
        except RankDeficiencyError as exc:
            logger.warning("seed %s: %s", seed, exc)
        rep = B.weyl_check(Y, Ys - Y)
        reports.append(B.BoundReport("weyl", rep.lhs, rep.rhs, params))

        N_gnd, N_star = column_space(Y, cfg.r), column_space(Ys, cfg.r)
        ang = canonical_angles(N_gnd, N_star)
        reports.append(B.BoundReport(
            "eq5_frobenius",
            abs(projection_distance(N_gnd, N_star, "frobenius") - math.sqrt(2) * sin_theta_norm(ang, "frobenius")),
            0.0, params))
        reports.append(B.BoundReport(
            "eq5_spectral",
            abs(projection_distance(N_gnd, N_star, "spectral") - sin_theta_norm(ang, "spectral")),
            0.0, params))

        rng = np.random.default_rng(_ss(seed, _USERS))
        users = rng.choice(cfg.n, size=min(cfg.users_per_seed, cfg.n), replace=False)
        reports.extend(thm4_reports(N_gnd, N_star, Y, Yh, omega, users, seed))

        by_col = _observed_rows_by_column(omega)
        smins = [(restricted_sigma_min(N_gnd, by_col[j]), by_col[j].size) for j in users if by_col[j].size]
        if smins:
            mu = cfg.mu if cfg.mu > 0 else coherence_mu0(N_gnd)
            try:
                lower = B.prop1_rhs(cfg.r, cfg.m, cfg.sampling_rate, mu)
                reports.append(B.BoundReport("prop1", lower, min(s for s, _ in smins), {**params, "mu": mu}))
            except Exception as exc:  # noqa: BLE001 - invalid radicand is data-dependent
                logger.warning("prop1 skipped: %s", exc)
            worst = min(smins, key=lambda sc: sc[0] - B.prop2_rhs(sc[1], cfg.m, cfg.r, cfg.constants))
            reports.append(B.BoundReport("prop2", B.prop2_rhs(worst[1], cfg.m, cfg.r, cfg.constants),
                                         worst[0], {**params, "observed_rows": worst[1]}))
        reports.extend(_attack_bound_reports(cfg, seed, inst))

    fit = fit_thm1_constant(trials)
    C = max(fit.C, 0.0) if math.isfinite(fit.C) else math.nan
    for seed, t in zip(cfg.seeds, trials):
        reports.append(B.BoundReport("thm1_fitted_C", t["rmse"], t["sampled"] + t["full"] + C * t["term"],
                                     {"seed": seed, "C": C, "eligible": t["eligible"]}))

    seed0 = cfg.seeds[0]
    reports.extend(eq5_suite(cfg.bound_trials, seed=seed0))
    reports.extend(weyl_suite(cfg.bound_trials, seed=seed0))
    reports.extend(thm3_suite(cfg.bound_trials, seed=seed0))

    if write:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        B.reports_to_csv(out / "bounds.csv", reports)
        write_csv(out / "constants.csv", ["scope", "C_fit", "trials_used", "trials_excluded"],
                  [dict(scope="thm1", C_fit=fit.C, trials_used=fit.used, trials_excluded=fit.excluded)])
    return reports, fit


# ---------------------------------------------------------------- oracle / sigma-min

def run_oracle(cfg: ExperimentConfig, write=True):
    rows = []
    for seed in cfg.seeds:
        Y = ground_truth(cfg, seed)
        E = cfg.noise_sigma * np.random.default_rng(_ss(seed, _NOISE)).standard_normal(Y.shape)
        omega = sample_uniform(Y.shape, round(cfg.sampling_rate * Y.size), _ss(seed, _OMEGA))
        _, rep = B.oracle_complete(column_space(Y, cfg.r), ObservedMatrix(Y + E, omega, cfg.k), Y)
        rows.append(dict(scenario="oracle", seed=seed, m=cfg.m, n=cfg.n, r=cfg.r,
                         p=cfg.sampling_rate, noise_sigma=cfg.noise_sigma, rmse_oracle=rep.lhs,
                         predicted=rep.rhs, ratio=rep.inputs["ratio"],
                         rmse_vs_truth=rep.inputs["rmse_vs_truth"],
                         degenerate_columns=rep.inputs["degenerate_columns"]))
    if write:
        _emit(cfg, "oracle", ORACLE_COLUMNS, rows)
    return rows


def run_sigma_min(cfg: ExperimentConfig, write=True):
    """Smallest singular value of randomly row-restricted Gaussian bases."""
    rows = []
    rates = cfg.sampling_rates or (cfg.sampling_rate,)
    for p in rates:
        for seed in cfg.seeds:
            rng = np.random.default_rng(_ss(seed, _ROWS, cfg.m, cfg.r, round(p * 1e6)))
            N = orthonormalize(rng.standard_normal((cfg.m, cfg.r)))
            count = max(1, round(p * cfg.m))
            sel = rng.choice(cfg.m, size=count, replace=False)
            smin = restricted_sigma_min(N, sel)
            lower = B.prop2_rhs(count, cfg.m, cfg.r, cfg.constants)
            rows.append(dict(scenario="sigma-min", seed=seed, p=p, m=cfg.m, r=cfg.r,
                             observed_rows=count, sigma_min=smin,
                             sigma_min_over_sqrt_p=smin / math.sqrt(p), prop2_rhs=lower,
                             prop2_satisfied=bool(lower <= smin + B.REPORT_TOL),
                             coherence_mu0=coherence_mu0(N)))
    if write:
        _emit(cfg, "sigma_min", SIGMA_COLUMNS, rows)
    return rows


# ---------------------------------------------------------------- completion

def complete_matrix(input_path, r, cfg: ExperimentConfig, output_path=None, shape=None):
    """Complete a triplet CSV with rank-``r`` ALS; returns the dense CSV path."""
    obs = read_triplets(input_path, shape=shape, k=cfg.k)
    sol = als_solve(obs, r, cfg.solver, cfg.seeds[0])
    Y = sol.completion()
    out = Path(output_path) if output_path else Path(cfg.output_dir) / (Path(input_path).stem + "_completed.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_dense(out, Y)
    s = np.linalg.svd(Y, compute_uv=False)
    summary = {
        "objective": repr(sol.final_objective),
        "iterations": sol.iterations,
        "converged": str(sol.converged).lower(),
        "sigma_r": repr(float(s[r - 1])) if s.size >= r else "0.0",
        "rank": r,
        "box_mode": cfg.solver.box_mode,
        "k": repr(obs.k),
    }
    out.with_name(out.stem + "_summary.txt").write_text(
        "".join(f"{k}: {v}\n" for k, v in summary.items()))
    return out
