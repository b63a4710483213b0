import numpy as np
import pytest

from mfstab.errors import InvalidArgument, ParseError
from mfstab.harness.cli import main
from mfstab.harness.config import ExperimentConfig, load_config, make_config, parse_config
from mfstab.harness.scenarios import (
    FIGURE_COLUMNS,
    ORACLE_COLUMNS,
    SIGMA_COLUMNS,
    fit_thm1_constant,
    plot_figure1,
    read_csv,
    run_bound_suite,
    run_figure1,
    run_figure2,
    run_oracle,
    run_sigma_min,
)
from mfstab.matcore import read_dense

TINY_FIG = dict(m=40, n=40, r=2, attacker_counts=(0, 4), seeds=(0, 1))


def test_parse_config():
    text = """
    # comment
    m = 50          # trailing comment
    seeds = 1, 2,3
    sampling_rates = 0.1, 0.5
    ridge = 1e-8
    C_thm2 = 2
    normalize_to_k = false
    """
    flat = parse_config(text)
    assert flat == dict(m=50, seeds=(1, 2, 3), sampling_rates=(0.1, 0.5), ridge=1e-8,
                        C_thm2=2.0, normalize_to_k=False)
    cfg = make_config("bounds", flat)
    assert cfg.solver.ridge == 1e-8 and cfg.constants.C_thm2 == 2.0 and cfg.m == 50


@pytest.mark.parametrize("text,line", [("m = 5\nbogus = 1\n", 2), ("m five\n", 1), ("m = x\n", 1)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_config_validation_and_presets():
    with pytest.raises(InvalidArgument):
        ExperimentConfig(sampling_rate=0)
    with pytest.raises(InvalidArgument):
        ExperimentConfig(seeds=())
    with pytest.raises(ParseError):
        make_config("bounds", {"scenario": "oracle"})
    full = make_config("figure1")
    assert (full.m, full.n, full.r) == (1000, 1000, 10)
    assert full.attacker_counts == (0, 25, 50, 100, 200, 400)
    desk = make_config("figure1", desk=True)
    assert (desk.m, desk.n, desk.r, desk.sampling_rate) == (300, 300, 5, 0.2)


def test_load_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("scenario = oracle\nseeds = 7\n")
    assert load_config(path, "oracle").seeds == (7,)


def test_figure_csv_schema_and_plot_regeneration(tmp_path):
    cfg = make_config("figure1", dict(TINY_FIG, output_dir=str(tmp_path)))
    rows = run_figure1(cfg)
    assert len(rows) == 2 * 2 * 2
    csv_path = tmp_path / "figure1.csv"
    assert csv_path.read_text().splitlines()[0] == ",".join(FIGURE_COLUMNS)
    assert (tmp_path / "figure1_timings.csv").exists()
    svg = (tmp_path / "figure1.svg").read_text()
    plot_figure1(csv_path, tmp_path / "again.svg")
    assert (tmp_path / "again.svg").read_text() == svg
    zero = [r for r in rows if r["n_e"] == 0]
    # without attackers both models solve the same problem
    assert zero[0]["rmse_total"] == zero[1]["rmse_total"]


def test_figure2_zero_attackers_has_zero_rmse_e(tmp_path):
    cfg = make_config("figure2", dict(TINY_FIG, output_dir=str(tmp_path)))
    rows = run_figure2(cfg)
    assert all(r["rmse_E"] == 0.0 for r in rows if r["n_e"] == 0)
    assert {r["model"] for r in rows} == {"mass"}


def test_oracle_and_sigma_schema(tmp_path):
    cfg = make_config("oracle", dict(m=30, n=30, r=2, seeds=(0,), output_dir=str(tmp_path)))
    run_oracle(cfg)
    assert (tmp_path / "oracle.csv").read_text().splitlines()[0] == ",".join(ORACLE_COLUMNS)
    cfg = make_config("sigma-min", dict(m=100, r=3, sampling_rates=(1.0,), seeds=(0, 1),
                                        output_dir=str(tmp_path)))
    rows = run_sigma_min(cfg)
    assert all(r["sigma_min"] == pytest.approx(1.0, abs=1e-12) for r in rows)
    assert (tmp_path / "sigma_min.csv").read_text().splitlines()[0] == ",".join(SIGMA_COLUMNS)


def test_bound_suite_noiseless_all_satisfied(tmp_path):
    cfg = make_config("bounds", dict(noise_sigma=0.0, seeds=(0, 1), bound_trials=5,
                                     output_dir=str(tmp_path)))
    reports, fit = run_bound_suite(cfg)
    thm1 = [r for r in reports if r.name == "thm1_unit_C"]
    assert all(r.lhs < 1e-6 for r in thm1)
    bad = [r.name for r in reports if not r.satisfied]
    assert bad == []
    rows = read_csv(tmp_path / "bounds.csv")
    assert len(rows) == len(reports)
    for row in rows:
        ok = float(row["lhs"]) <= float(row["rhs"]) + 1e-9
        # thm3 rows carry a relative tolerance on top of the absolute one
        assert (row["satisfied"] == "true") == ok or row["name"].startswith("thm3_")


def test_fit_thm1_constant():
    trials = [dict(rmse=1.0, sampled=0.2, full=0.3, term=0.5, eligible=True),
              dict(rmse=2.0, sampled=0.0, full=0.0, term=1.0, eligible=True),
              dict(rmse=9.0, sampled=0.0, full=0.0, term=1.0, eligible=False)]
    fit = fit_thm1_constant(trials)
    assert (fit.C, fit.used, fit.excluded) == (2.0, 2, 1)


def _rank1_file(tmp_path):
    path = tmp_path / "r1.csv"
    path.write_text("row,col,value\n0,0,1\n0,1,2\n1,0,2\n")
    return path


def test_cli_complete_rank_one_closure(tmp_path, capsys):
    src = _rank1_file(tmp_path)
    out = tmp_path / "dense.csv"
    assert main(["complete", str(src), "--rank", "1", "-o", str(out), "--out", str(tmp_path)]) == 0
    Y = read_dense(out)
    assert Y[1, 1] == pytest.approx(4.0, abs=1e-5)
    summary = (tmp_path / "dense_summary.txt").read_text()
    assert "objective:" in summary and "sigma_r:" in summary
    first = out.read_bytes()
    assert main(["complete", str(src), "--rank", "1", "-o", str(out)]) == 0
    assert out.read_bytes() == first


def test_complete_fully_observed(tmp_path, rng):
    Y = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 5))
    lines = ["row,col,value"] + [f"{i},{j},{float(Y[i, j])!r}" for i in range(6) for j in range(5)]
    src = tmp_path / "full.csv"
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "o.csv"
    assert main(["complete", str(src), "-r", "2", "-o", str(out)]) == 0
    assert np.sqrt(np.mean((read_dense(out) - Y) ** 2)) < 1e-6


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("row,col,value\n0,0,zz\n")
    assert main(["complete", str(bad), "-r", "1", "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err
    starved = tmp_path / "starved.csv"
    starved.write_text("row,col,value\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n2,2,1\n")
    assert main(["complete", str(starved), "-r", "2", "--out", str(tmp_path)]) == 2
    assert "column" in capsys.readouterr().err
    cfg = tmp_path / "c.cfg"
    cfg.write_text("nonsense = 1\n")
    assert main(["oracle", "--config", str(cfg)]) == 2
    assert main(["complete", str(tmp_path / "missing.csv"), "-r", "1"]) == 2


def test_cli_verify_bounds_ok(tmp_path, capsys):
    cfg = tmp_path / "b.cfg"
    cfg.write_text("m = 40\nn = 50\nr = 2\nsampling_rate = 0.5\nseeds = 0\nbound_trials = 5\n")
    assert main(["verify", "bounds", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert "deterministic satisfied" in capsys.readouterr().out


def test_cli_seed_shifts_seed_list(tmp_path):
    cfg = tmp_path / "o.cfg"
    cfg.write_text("m = 30\nn = 30\nr = 2\nseeds = 0, 1\n")
    assert main(["oracle", "--config", str(cfg), "--seed", "10", "--out", str(tmp_path)]) == 0
    assert [r["seed"] for r in read_csv(tmp_path / "oracle.csv")] == ["10", "11"]
