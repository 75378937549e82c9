import io
import json
import subprocess
import sys

import pytest

from dpgie.cli import EXIT_INPUT, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_critical_distance_horizontal():
    code, out, _ = run("critical-distance", "horizontal")
    assert code == EXIT_OK
    header, rows = _rows(out)
    assert header == ["geometry", "sigma", "d_c", "d_c_over_sigma", "residual", "iterations"]
    assert abs(float(rows[0][3]) - 0.850872) < 1e-4


def test_critical_distance_transversal_json():
    code, out, _ = run("critical-distance", "transversal", "--format", "json")
    assert code == EXIT_OK
    assert abs(json.loads(out)["d_c_over_sigma"] - 2.21093) < 1e-3


def test_e_minus_dimensionless():
    code, out, _ = run("e-minus", "--dimensionless")
    header, rows = _rows(out)
    rec = dict(zip(header, rows[0]))
    assert abs(float(rec["e_minus_reduced"]) / -0.0001915 - 1) < 1e-3
    assert rec["entangled"] == "true"


def test_negativity_series_metadata_and_rows():
    code, out, _ = run("negativity-series", "--t-max", "1000", "--steps", "11")
    assert code == EXIT_OK
    meta = [ln for ln in out.splitlines() if ln.startswith("#")]
    assert "# sigma=5.0000000000000002e-05" in meta
    header, rows = _rows(out)
    assert header == ["t", "dp_min_eig"]
    assert len(rows) == 11 and float(rows[0][0]) == 0.0


def test_two_steps():
    code, out, _ = run("negativity-series", "--steps", "2", "--t-max", "5")
    assert code == EXIT_OK
    assert len(_rows(out)[1]) == 2


def test_byte_identical_runs():
    a = run("compare", "--t-max", "5000", "--steps", "300", "--sigma", "1e-4")
    b = run("compare", "--t-max", "5000", "--steps", "300", "--sigma", "1e-4")
    assert a == b
    header, rows = _rows(a[1])
    assert header == ["t", "dp_min_eig", "unitary_min_eig"]
    assert "# unitary_period=" in a[1]


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"sigma": 1e-4, "steps": 5, "t_max": 100}))
    code, out, _ = run("negativity-series", "--config", str(cfg), "--steps", "7")
    assert code == EXIT_OK
    assert "# sigma=0.0001" in out and "# steps=7" in out
    assert len(_rows(out)[1]) == 7


def test_json_series(tmp_path):
    dest = tmp_path / "s.json"
    code, out, _ = run("negativity-series", "--steps", "4", "--format", "json", "--out", str(dest))
    assert code == EXIT_OK and out == ""
    data = json.loads(dest.read_text())
    assert len(data["t"]) == len(data["dp_min_eig"]) == 4
    assert data["metadata"]["geometry"] == "horizontal"


def test_scan_flips_sign_once():
    code, out, _ = run("scan", "--dimensionless", "--L", "0.01", "--sweep", "d",
                       "--range", "0.5", "1.2", "--points", "30")
    assert code == EXIT_OK
    header, rows = _rows(out)
    flags = [r[header.index("entangled")] for r in rows]
    assert flags[0] == "true" and flags[-1] == "false"
    assert sum(a != b for a, b in zip(flags, flags[1:])) == 1


def test_verify_passes():
    code, out, _ = run("verify")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("quantity,reference")
    assert all(ln.endswith(",pass") for ln in out.splitlines()[1:])


@pytest.mark.parametrize("argv", [
    ("e-minus", "--sigma", "-1"),
    ("e-minus", "--steps", "1"),
    ("scan", "--sweep", "hbar", "--range", "0", "1"),
    ("scan",),
    ("nonsense",),
    ("e-minus", "--geometry", "oblique"),
])
def test_invalid_input_exit_code(argv):
    code, _, err = run(*argv)
    assert code == EXIT_INPUT


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"sigmaa": 1}))
    assert run("e-minus", "--config", str(cfg))[0] == EXIT_INPUT


def test_io_errors(tmp_path):
    assert run("e-minus", "--config", str(tmp_path / "missing.json"))[0] == EXIT_IO
    code, _, err = run("e-minus", "--out", str(tmp_path / "no" / "dir" / "x.csv"))
    assert code == EXIT_IO and "cannot write" in err


def test_numeric_failure_exit_code(monkeypatch):
    from dpgie import verification
    from dpgie.verification import OracleReport

    monkeypatch.setattr(verification, "run_all",
                        lambda: [OracleReport.compare("x", 1.0, 2.0, 1e-6)])
    code, out, _ = run("verify")
    assert code == EXIT_NUMERIC and out.rstrip().endswith(",fail")


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "dpgie.cli", "critical-distance"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "0.8508" in proc.stdout
