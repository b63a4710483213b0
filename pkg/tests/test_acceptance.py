"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line (printed in the terminal summary) and
then asserts the same condition.
"""
import math
import time

import numpy as np
import pytest

from mfstab.bounds import weyl_check
from mfstab.harness.config import make_config
from mfstab.harness.scenarios import (
    eq5_suite,
    fit_thm1_constant,
    noisy_instance,
    run_bound_suite,
    run_figure1,
    run_figure2,
    run_oracle,
    run_sigma_min,
    thm3_suite,
    thm4_reports,
    weyl_suite,
)
from mfstab.harness.cli import main
from mfstab.subgeo import canonical_angles, column_space, sin_theta_norm

# frozen after pilot calibration at desk scale
FIG_THRESH_TARGETED_GROWTH = 1.5
FIG_THRESH_MASS_OVER_TARGETED = 2.0
FIG_THRESH_E_OVER_Y = 3.0
DESK = dict(attacker_counts=(0, 25, 50, 100, 200), seeds=(0, 1, 2, 3, 4), sampling_rate=0.2, k=1.0)


def test_projector_identities(acceptance_log):
    t0 = time.perf_counter()
    reps = eq5_suite(100, m=60, r=6, seed=0)
    dt = time.perf_counter() - t0
    worst = max(r.lhs for r in reps)
    ok = worst <= 1e-9 and dt < 5
    acceptance_log(1, ok, f"projector/sin-theta identities, worst gap {worst:.2e} over 100 pairs, {dt:.2f}s")
    assert ok


def test_weyl_suite(acceptance_log):
    t0 = time.perf_counter()
    reps = weyl_suite(100, seed=0)
    dt = time.perf_counter() - t0
    good = sum(r.lhs <= r.rhs + 1e-9 for r in reps)
    ok = good == 100 and dt < 5
    acceptance_log(2, ok, f"Weyl suite {good}/100 satisfied, {dt:.2f}s")
    assert ok


def test_subspace_perturbation_suite(acceptance_log):
    t0 = time.perf_counter()
    reps = thm3_suite(100, m=80, n=100, r=5, rel=0.1, seed=0)
    dt = time.perf_counter() - t0
    bad = [r for r in reps if not r.lhs <= r.rhs + max(1e-9, 1e-8 * r.rhs)]
    ok = not bad and len(reps) == 700 and dt < 30
    acceptance_log(3, ok, f"sin-theta/sin-phi and delta brackets: {len(reps) - len(bad)}/{len(reps)} satisfied, {dt:.2f}s")
    assert ok


def test_per_user_prediction_bound(acceptance_log):
    t0 = time.perf_counter()
    cfg = make_config("bounds", dict(users_per_seed=20))
    inside, outside = [], []
    for p in (0.2, 0.5):
        for seed in range(5):
            inst = noisy_instance(cfg, seed, p=p)
            Y, E, omega = inst["Y"], inst["E"], inst["omega"]
            N_gnd, N_star = column_space(Y, cfg.r), column_space(inst["Ys"], cfg.r)
            users = np.random.default_rng([seed, 77]).choice(cfg.n, 20, replace=False)
            for rep in thm4_reports(N_gnd, N_star, Y, Y + E, omega, users, seed):
                (inside if rep.name == "thm4_in_subspace" else outside).append(rep)
    dt = time.perf_counter() - t0
    good_in = sum(r.lhs <= r.rhs + 1e-8 for r in inside)
    good_out = sum(r.lhs <= r.rhs + 1e-8 for r in outside)
    ok = len(inside) == 200 and good_in == 200 and good_out == len(outside) and dt < 30
    acceptance_log(4, ok, f"per-user bound in-subspace {good_in}/{len(inside)}, "
                          f"out-of-subspace {good_out}/{len(outside)}, {dt:.2f}s")
    assert ok


def test_noiseless_recovery(acceptance_log):
    t0 = time.perf_counter()
    cfg = make_config("bounds", dict(noise_sigma=0.0))
    hits = 0
    for seed in range(20):
        inst = noisy_instance(cfg, seed)
        rho = sin_theta_norm(canonical_angles(column_space(inst["Y"], cfg.r),
                                              column_space(inst["Ys"], cfg.r)))
        hits += inst["trial"]["rmse"] <= 1e-6 and rho <= 1e-5
    dt = time.perf_counter() - t0
    ok = hits >= 19 and dt < 60
    acceptance_log(5, ok, f"noiseless recovery in {hits}/20 seeds (need 19), {dt:.2f}s")
    assert ok


def test_oracle_ratio(acceptance_log):
    t0 = time.perf_counter()
    cfg = make_config("oracle", dict(seeds=tuple(range(20))))
    rows = run_oracle(cfg, write=False)
    dt = time.perf_counter() - t0
    ratios = [r["ratio"] for r in rows]
    ok = len(rows) == 20 and all(0.5 <= x <= 2 for x in ratios) and dt < 60
    acceptance_log(6, ok, f"oracle ratio in [{min(ratios):.3f}, {max(ratios):.3f}] over 20 seeds, {dt:.2f}s")
    assert ok


def test_rmse_constant_stability(acceptance_log):
    t0 = time.perf_counter()
    cfg = make_config("bounds")
    fits = {}
    for n in (200, 400):
        for p in (0.2, 0.4):
            for sigma in (0.0, 0.1):
                trials = [noisy_instance(cfg, s, m=n, n=n, p=p, sigma=sigma)["trial"] for s in range(5)]
                fits[(n, p, sigma)] = fit_thm1_constant(trials).C
    vals = np.array(list(fits.values()))
    finite_pos = np.all(np.isfinite(vals)) and np.all(vals > 0)
    spread = vals.max() / vals.min() if finite_pos else math.inf
    C = max(float(np.nanmax(vals)), 0.0)
    cells = list(fits)
    held = 0
    for i in range(10):
        n, p, sigma = cells[i % len(cells)]
        t = noisy_instance(cfg, 1000 + i, m=n, n=n, p=p, sigma=sigma)["trial"]
        held += t["rmse"] <= t["sampled"] + t["full"] + C * t["term"] + 1e-9
    dt = time.perf_counter() - t0
    ok = spread <= 3 and held == 10 and dt < 300
    desc = ", ".join(f"n={n} p={p} s={s}: {c:.3g}" for (n, p, s), c in fits.items())
    acceptance_log(7, ok, f"fitted C spread {spread:.3g} (need <= 3), held-out {held}/10 "
                          f"with C={C:.3g}, {dt:.1f}s [{desc}]")
    assert ok


@pytest.fixture(scope="module")
def figure_runs(tmp_path_factory):
    out = tmp_path_factory.mktemp("figs")
    timings = {}
    t0 = time.perf_counter()
    f1 = run_figure1(make_config("figure1", dict(DESK, output_dir=str(out)), desk=True))
    timings["figure1"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    f2 = run_figure2(make_config("figure2", dict(DESK, output_dir=str(out)), desk=True))
    timings["figure2"] = time.perf_counter() - t0
    return f1, f2, timings


def _mean(rows, model, n_e, key):
    vals = [r[key] for r in rows if r["model"] == model and r["n_e"] == n_e and not r["flagged"]]
    return float(np.mean(vals)) if vals else math.nan


def test_attack_model_comparison(figure_runs, acceptance_log):
    rows, _, timings = figure_runs
    t0 = _mean(rows, "targeted", 0, "rmse_total")
    t200 = _mean(rows, "targeted", 200, "rmse_total")
    m200 = _mean(rows, "mass", 200, "rmse_total")
    ok = (t200 <= FIG_THRESH_TARGETED_GROWTH * t0 and m200 >= FIG_THRESH_MASS_OVER_TARGETED * t200
          and timings["figure1"] < 600)
    acceptance_log(8, ok, f"targeted RMSE {t0:.4f} -> {t200:.4f} (x{t200 / t0:.2f}), "
                          f"mass/targeted at 200 = {m200 / t200:.2f}, {timings['figure1']:.1f}s")
    assert ok


def test_honest_vs_attacker_error(figure_runs, acceptance_log):
    _, rows, timings = figure_runs
    counts = [c for c in DESK["attacker_counts"] if c > 0]
    ry = [_mean(rows, "mass", c, "rmse_Y") for c in counts]
    re = [_mean(rows, "mass", c, "rmse_E") for c in counts]
    ratio = [y / e for y, e in zip(ry, re)]
    inversions = sum(b < a for a, b in zip(ratio, ratio[1:]))
    first = re[0] / ry[0]
    ok = first >= FIG_THRESH_E_OVER_Y and inversions <= 1 and timings["figure2"] < 600
    acceptance_log(9, ok, f"RMSE_E/RMSE_Y at n_e={counts[0]} = {first:.2f}, RMSE_Y/RMSE_E "
                          f"{' '.join(f'{x:.3f}' for x in ratio)} ({inversions} inversions), "
                          f"{timings['figure2']:.1f}s")
    assert ok


def test_restricted_sigma_min(acceptance_log):
    t0 = time.perf_counter()
    cfg = make_config("sigma-min")
    rows = run_sigma_min(cfg, write=False)
    dt = time.perf_counter() - t0
    parts, ok = [], dt < 120
    for p in (0.1, 0.3, 0.5):
        sel = [r for r in rows if r["p"] == p]
        band = np.mean([0.8 <= r["sigma_min_over_sqrt_p"] <= 1.05 for r in sel])
        lower = np.mean([r["prop2_satisfied"] for r in sel])
        ok = ok and len(sel) == 40 and band >= 0.95 and lower >= 0.95
        parts.append(f"p={p}: band {band:.1%}, lower bound {lower:.1%}")
    acceptance_log(10, ok, "; ".join(parts) + f", {dt:.1f}s")
    assert ok


def _snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())
            if p.suffix in (".csv", ".txt") and "_timings" not in p.name}


def test_determinism(tmp_path, acceptance_log):
    src = tmp_path / "in.csv"
    rng = np.random.default_rng(3)
    Y = rng.standard_normal((30, 2)) @ rng.standard_normal((2, 25))
    keep = rng.random(Y.shape) < 0.5
    src.write_text("row,col,value\n" + "".join(
        f"{i},{j},{float(Y[i, j])!r}\n" for i, j in zip(*np.nonzero(keep))))
    small = dict(m=60, n=60, r=3, seeds=(0, 1))
    runs = []
    for rep in ("a", "b"):
        out = tmp_path / rep
        out.mkdir()
        run_figure1(make_config("figure1", dict(small, attacker_counts=(0, 6), output_dir=str(out))))
        run_figure2(make_config("figure2", dict(small, attacker_counts=(0, 6), output_dir=str(out))))
        run_bound_suite(make_config("bounds", dict(bound_trials=10, seeds=(0, 1), output_dir=str(out))))
        run_oracle(make_config("oracle", dict(small, output_dir=str(out))))
        run_sigma_min(make_config("sigma-min", dict(m=500, seeds=(0, 1, 2), output_dir=str(out))))
        assert main(["complete", str(src), "-r", "2", "--out", str(out)]) == 0
        runs.append(_snapshot(out))
    same = [name for name in runs[0] if runs[0][name] == runs[1].get(name)]
    ok = len(runs[0]) >= 7 and len(same) == len(runs[0]) and runs[0].keys() == runs[1].keys()
    acceptance_log(11, ok, f"{len(same)}/{len(runs[0])} output files byte-identical across reruns")
    assert ok
