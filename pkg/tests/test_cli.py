import csv
import io
import json
import math
import subprocess
import sys

import pytest

from xyquench.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, fmt, main, resolve_settings

HEADER = "param,m_z,t_xx,t_yy,t_zz,t_xy,negativity,log_negativity,min_pt_eig"


def run(args, capsys, env=None):
    code = main(args, env=env or {})
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    footers = dict(ln[2:].split("=", 1) for ln in text.splitlines() if ln.startswith("# "))
    return list(csv.DictReader(io.StringIO("\n".join(body)))), footers


def test_point_separable(capsys):
    code, out, _ = run(["point", "--gamma", "0.5", "--a", "0.78", "--t", "1", "--beta", "inf"], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith(HEADER)
    rows, foot = parse_csv(out)
    assert float(rows[0]["log_negativity"]) == 0.0
    assert foot["beta"] == "inf"
    assert float(rows[0]["min_rdm_eig"]) >= -1e-8


def test_point_hot_is_maximally_mixed(capsys):
    code, out, _ = run(["point", "--gamma", "0.5", "--a", "0.5", "--t", "1", "--beta", "0.001",
                        "--format", "json"], capsys)
    assert code == EXIT_OK
    rec = json.loads(out.splitlines()[0])
    for k in ("m_z", "t_xx", "t_yy", "t_zz", "t_xy"):
        assert abs(rec[k]) < 1e-3
    assert rec["log_negativity"] == 0.0


def test_zero_anisotropy_is_config_error(capsys):
    code, out, err = run(["point", "--gamma", "0", "--a", "0.5"], capsys)
    assert code == EXIT_CONFIG and out == ""
    assert "nonzero" in err and "anisotropy" in err


@pytest.mark.parametrize("args", [
    ["point", "--beta", "-1"],
    ["point", "--t", "-2"],
    ["point", "--abs-tol", "0"],
    ["scan", "--steps", "1"],
    ["point", "--config", "/nonexistent/file.cfg"],
])
def test_bad_configs(args, capsys):
    assert run(args, capsys)[0] == EXIT_CONFIG


def test_field_scan_footer(capsys):
    code, out, _ = run(["scan", "--axis", "field", "--gamma", "0.5", "--t", "1", "--lo", "0.3",
                        "--hi", "1.2", "--steps", "181"], capsys)
    assert code == EXIT_OK
    rows, foot = parse_csv(out)
    assert len(rows) == 181 and list(rows[0]) == HEADER.split(",")
    assert 0.74 < float(foot["a_c"]) < 0.78 < float(foot["a_bar_c"]) < 0.81


def test_field_scan_without_transition(capsys):
    code, out, _ = run(["scan", "--axis", "field", "--lo", "0.3", "--hi", "0.6", "--steps", "7"], capsys)
    assert code == EXIT_OK
    assert parse_csv(out)[1]["a_c"] == "none"


def test_temperature_scan_footer(capsys):
    code, out, _ = run(["scan", "--axis", "temperature", "--t", "10", "--a", "0.8"], capsys)
    assert code == EXIT_OK
    rows, foot = parse_csv(out)
    assert len(rows) == 41 and rows[-1]["param"] == "inf"
    assert foot["monotonicity"] == "MonotoneIncreasing"


def test_temperature_scan_second_entangled_phase(capsys):
    _, out, _ = run(["scan", "--axis", "temperature", "--t", "1", "--a", "0.81"], capsys)
    foot = parse_csv(out)[1]
    assert foot["monotonicity"] == "Nonmonotone" and float(foot["low_T_limit"]) > 0


def test_temperature_scan_custom_grid(capsys):
    code, out, _ = run(["scan", "--axis", "temperature", "--beta-grid",
                        "0.5,1,2,4,8,16,32,64,inf"], capsys)
    assert code == EXIT_OK and len(parse_csv(out)[0]) == 9


def test_time_scan(capsys):
    code, out, _ = run(["scan", "--axis", "time", "--a", "0.78", "--lo", "0", "--hi", "2", "--steps", "5"],
                       capsys)
    rows, foot = parse_csv(out)
    assert code == EXIT_OK and [r["param"] for r in rows] == ["0", "0.5", "1", "1.5", "2"]
    assert float(rows[0]["t_xy"]) == 0.0


def test_phase_diagram_single_cell_matches_point(capsys):
    _, pd_out, _ = run(["phase-diagram", "--a-lo", "0.78", "--a-steps", "1", "--t-lo", "1",
                        "--t-steps", "1"], capsys)
    _, pt_out, _ = run(["point", "--a", "0.78", "--t", "1"], capsys)
    cell = parse_csv(pd_out)[0][0]
    pt = parse_csv(pt_out)[0][0]
    for k in HEADER.split(",")[1:]:
        assert cell[k] == pt[k]


def test_phase_diagram_small_grid(capsys):
    code, out, _ = run(["phase-diagram", "--a-steps", "5", "--t-steps", "3", "--format", "json"], capsys)
    lines = [json.loads(ln) for ln in out.splitlines()]
    assert code == EXIT_OK and len(lines) == 16
    assert {"a", "t", "m_z", "log_negativity"} <= set(lines[0])
    assert lines[-1]["footer"]["n_a"] == 5


def test_validate_relaxed(capsys):
    code, out, _ = run(["validate", "--n-ed", "8", "--n-ff", "512"], capsys)
    rows, foot = parse_csv(out)
    assert code == EXIT_OK and foot["all_pass"] == "true"
    assert {r["tol"] for r in rows if r["routes"].startswith("FF")} == {fmt(4e-3)}


def test_validate_too_large(capsys):
    code, _, err = run(["validate", "--n-ed", "12"], capsys)
    assert code == EXIT_CONFIG and "N <= 10" in err


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(["point", "--abs-tol", "1e-30"], capsys)
    assert code == EXIT_NUMERICAL and "NonConvergence" in err


def test_byte_identical_output(tmp_path, capsys):
    args = ["scan", "--axis", "field", "--lo", "0.7", "--hi", "0.9", "--steps", "21"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--output", str(a)], capsys)[0] == EXIT_OK
    assert run(args + ["--output", str(b), "--workers", "2"], capsys)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_precision_of_numbers():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(math.inf) == "inf" and fmt(True) == "true"


def test_settings_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ngamma = 0.3\nabs-tol = 1e-9\na = 0.6\n")
    s = resolve_settings({"config": str(cfg), "a": 0.7}, env={"XYQ_ABS_TOL": "1e-11"})
    assert s["gamma"] == 0.3  # config over default
    assert s["abs_tol"] == 1e-11  # environment over config
    assert s["a"] == 0.7  # flag over config
    s2 = resolve_settings({"config": str(cfg), "abs_tol": 2e-10}, env={"XYQ_ABS_TOL": "1e-11"})
    assert s2["abs_tol"] == 2e-10  # flag over environment


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(["point", "--config", str(bad)], capsys)[0] == EXIT_CONFIG
    bad.write_text("gamma\n")
    assert run(["point", "--config", str(bad)], capsys)[0] == EXIT_CONFIG


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xyquench", "point", "--gamma", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_CONFIG
