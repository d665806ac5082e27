import csv
import subprocess
import sys

import pytest

from aoicov.cli.config import Kind, load_config, load_spec_text
from aoicov.cli.experiments import COLUMNS, run_experiment
from aoicov.cli.main import main
from aoicov.cli.report import ReportError, report_summary
from aoicov.errors import ConfigError


def _rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def test_defaults_without_file():
    spec = load_config(None)
    assert spec.kind is Kind.VALIDATE
    sp = spec.base.system
    assert (sp.link_distance, sp.pathloss_exp, sp.max_retx) == (20.0, 3.5, 10)
    assert len(sp.interferers) == 2


def test_comments_blank_lines_and_overlays():
    spec = load_spec_text("""
# comment
experiment = AvgAoiSweep   # trailing
sweep.min = 0
sweep.max = 2
overlay.1.max_retx = 5
overlay.2.link_distance = 30
""")
    assert spec.sweep.points() == [0.0, 1.0, 2.0]
    labels = [lab for lab, _ in spec.series()]
    assert labels == ["max_retx=5", "link_distance=30"]
    assert spec.overlays[1].system.link_distance == 30.0
    assert spec.overlays[1].system.max_retx == 10


@pytest.mark.parametrize("text,key,line", [
    ("max_retx = 0", "max_retx", 1),
    ("\nfoo = 1", "foo", 2),
    ("pathloss_exp = 2", "pathloss_exp", 1),
    ("max_retx = 2.5", "max_retx", 1),
    ("environment = vacuum", "environment", 1),
    ("eta = 1.5", "eta", 1),
    ("seed = 1\nseed = 2", "seed", 2),
    ("interferer.3.density = 1e-4", "interferer.3.power", 1),
    ("overlay.1.periods = 5", "overlay.1.periods", 1),
])
def test_config_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as exc:
        load_spec_text(text)
    assert exc.value.key == key
    assert exc.value.line == line
    assert key in str(exc.value)


def test_malformed_line():
    with pytest.raises(ConfigError, match="line 1"):
        load_spec_text("just words")


def test_avg_aoi_sweep_columns(tmp_path):
    spec = load_spec_text("experiment = AvgAoiSweep\nsweep.min = 10\nsweep.max = 12\n"
                          "periods = 2000")
    res = run_experiment(spec, tmp_path)
    rows = _rows(res.path)
    assert list(rows[0]) == COLUMNS[Kind.AVG_AOI_SWEEP]
    assert len(rows) == 3
    assert all(float(r["rel_err"]) < 0.2 for r in rows)
    raw = res.path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


def test_no_sim_leaves_sim_columns_empty(tmp_path):
    spec = load_spec_text("experiment = ViolationSweep\nsweep.min = 0\nsweep.max = 1")
    rows = _rows(run_experiment(spec, tmp_path, simulate=False).path)
    assert rows[0]["violation_sim"] == "" and rows[0]["violation_analytic"] != ""


def test_energy_sweep_marks_single_optimum(tmp_path):
    spec = load_spec_text("experiment = EnergySweep\nenvironment = noise-limited\n"
                          "max_retx = 9\nsweep.min = -8\nsweep.max = -3\nsweep.step = 0.5")
    rows = _rows(run_experiment(spec, tmp_path, simulate=False).path)
    best = [r for r in rows if r["is_optimum"] == "true"]
    assert len(best) == 1
    feas = [r for r in rows if r["feasible"] == "true"]
    assert float(best[0]["energy_analytic"]) == min(float(r["energy_analytic"]) for r in feas)


def test_optimal_power_flags_infeasible(tmp_path):
    spec = load_spec_text("experiment = OptimalPowerVsN\nenvironment = noise-limited\n"
                          "sweep.min = 8\nsweep.max = 16\nsweep.step = 4")
    rows = _rows(run_experiment(spec, tmp_path, simulate=False).path)
    assert [r["infeasible"] for r in rows] == ["false", "false", "true"]
    assert rows[1]["case"] != ""


def test_cli_run_and_report(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("experiment = EnergySweep\nsweep.min = -2\nsweep.max = 0\n", "utf-8")
    assert main(["run", "--config", str(cfg), "--output", str(tmp_path), "--periods", "500",
                 "--jobs", "2"]) == 0
    out_csv = tmp_path / "energy_sweep.csv"
    assert main(["report", str(out_csv)]) == 0
    text = capsys.readouterr().out
    assert "energy_analytic" in text and "series base" in text


def test_cli_reports_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("max_retx = 0\n", "utf-8")
    assert main(["run", "--config", str(cfg), "--output", str(tmp_path)]) == 2
    assert "max_retx" in capsys.readouterr().err


def test_report_edge_cases(tmp_path):
    import io
    empty = tmp_path / "e.csv"
    empty.write_text("series,max_retx,pt_dbm,pt_mw,p_s,n_bar,energy_analytic,energy_sim,"
                     "feasible,is_optimum\n", "utf-8")
    buf = io.StringIO()
    report_summary([empty], buf)
    assert "no rows" in buf.getvalue()
    infeas = tmp_path / "i.csv"
    infeas.write_text("series,pt_dbm,energy_analytic,feasible\nbase,0,1.0,false\n", "utf-8")
    buf = io.StringIO()
    report_summary([infeas], buf)
    assert "100% infeasible" in buf.getvalue()
    bad = tmp_path / "b.csv"
    bad.write_text("a,b\n1,2\n", "utf-8")
    with pytest.raises(ReportError):
        report_summary([bad], io.StringIO())


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "aoicov", "run", "--experiment",
                          "OptimalPowerVsN", "--no-sim", "--output", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "optimal_power_vs_n.csv").exists()


def test_analytic_cells_reproducible_from_row_inputs(tmp_path):
    from aoicov.aoi import average_aoi, violation_prob
    from aoicov.channel import dbm_to_mw, mw_to_dbm, stp

    spec = load_spec_text("experiment = ViolationSweep\nsweep.min = -3\nsweep.max = 9\n"
                          "sweep.step = 3\noverlay.1.max_retx = 4\noverlay.2.link_distance = 25")
    rows = _rows(run_experiment(spec, tmp_path, simulate=False).path)
    series = dict(spec.series())
    for r in rows:
        bp = series[r["series"]]
        pt = float(r["pt_mw"])
        assert dbm_to_mw(float(r["pt_dbm"])) == pt
        assert mw_to_dbm(pt) == pytest.approx(float(r["pt_dbm"]), abs=1e-12)
        p = stp(bp.system, bp.env, pt)
        assert float(r["p_s"]) == p
        assert float(r["violation_analytic"]) == violation_prob(
            p, float(r["v_th"]), bp.system.retx_interval, bp.system.tx_duration,
            int(r["max_retx"]))
    spec = load_spec_text("experiment = AvgAoiSweep\nsweep.min = 0\nsweep.max = 4\n"
                          "sweep.step = 2")
    for r in _rows(run_experiment(spec, tmp_path, simulate=False).path):
        assert float(r["aoi_analytic"]) == average_aoi(float(r["p_s"]), 1.0, 1.0, 10)


def test_energy_report_names_optimizer_optimum(tmp_path):
    import io

    from aoicov.channel import mw_to_dbm
    from aoicov.energy import optimize

    step = 0.05
    spec = load_spec_text("experiment = EnergySweep\nenvironment = noise-limited\nmax_retx = 9\n"
                          f"sweep.min = -8\nsweep.max = -3\nsweep.step = {step}")
    res = run_experiment(spec, tmp_path, simulate=False)
    buf = io.StringIO()
    report_summary([res.path], buf)
    line = next(s for s in buf.getvalue().splitlines() if "energy-minimising P_t" in s)
    reported = float(line.split(":")[1].split("dBm")[0])
    best = optimize(spec.base.energy, spec.base.corr, spec.base.env)
    assert abs(reported - mw_to_dbm(best.p_t_star)) <= step


def test_optimal_power_row_for_nine(tmp_path):
    spec = load_spec_text("experiment = OptimalPowerVsN\nenvironment = noise-limited\n"
                          "sweep.min = 9\nsweep.max = 9")
    row = _rows(run_experiment(spec, tmp_path, simulate=False).path)[0]
    assert float(row["pt_star_dbm"]) == pytest.approx(-5.18, abs=0.3)
