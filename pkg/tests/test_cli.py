import json
import math
import subprocess
import sys

import pytest

from monopole_wkb import io
from monopole_wkb.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_table(capsys):
    code, out, _ = run(["spectrum", "--N", "10", "--jmax", "3"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(io.SPECTRUM_COLUMNS)
    rows = [ln.split(",") for ln in lines[1:]]
    assert [float(r[2]) for r in rows] == [5, 17, 31, 47]
    assert [float(r[3]) for r in rows] == [5.25, 17.25, 31.25, 47.25]
    assert {r[4] for r in rows} == {"0.25"}


def test_spectrum_single_row(capsys):
    code, out, _ = run(["spectrum", "--N", "1", "--jmax", "0"], capsys)
    assert code == 0
    assert out.strip().splitlines()[1] == "1,0,0.5,0.75,0.25,2,2"


def test_spectrum_numeric(capsys):
    code, out, _ = run(["spectrum", "--N", "2", "--jmax", "1", "--numeric", "--grid", "400"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(io.SPECTRUM_NUMERIC_COLUMNS)
    assert lines[1].split(",")[-1] == "3" and lines[2].split(",")[-1] == "5"


@pytest.mark.parametrize("argv", [["spectrum", "--N", "0"], ["spectrum"], ["spectrum", "--N", "x"],
                                  ["torus", "--E", "0.1", "--P", "1"], ["nonsense"],
                                  ["flow", "--theta", "0"], ["quasimode", "--N", "8", "--j", "2", "--k1", "99"],
                                  ["verify", "--inject-fault", "bogus"], ["verify", "--only", "11"]])
def test_validation_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_torus_json(capsys):
    code, out, _ = run(["torus", "--E", "0.3125", "--P", "0", "--B", "0.5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["J"] == pytest.approx(math.pi / 2, abs=1e-15)
    assert doc["Delta1"] == 0.703125


def test_flow_stationary_circle(capsys):
    code, out, err = run(["flow", "--theta", "1.0471975511965976", "--ptheta", "0", "--pphi", "-0.75",
                          "--B", "0.5", "--tmax", "4", "--samples", "9", "--closure"], capsys)
    assert code == 0
    rows = [list(map(float, ln.split(","))) for ln in out.strip().splitlines()[1:]]
    assert len(rows) == 9
    assert max(abs(r[1] - math.pi / 3) for r in rows) < 1e-9
    assert "period=3.14159265" in err


def test_flow_convergence_failure_exit_3(capsys):
    code, _, err = run(["flow", "--theta", "1.2", "--ptheta", "0.4", "--pphi", "-0.2", "--tmax", "0.1",
                        "--closure"], capsys)
    assert code == 3 and "numerical failure" in err


def test_quasimode_residual_csv(capsys):
    code, out, _ = run(["quasimode", "--N", "32", "--j", "2", "--k1", "16"], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == ",".join(io.RESIDUAL_COLUMNS)
    vals = row.split(",")
    assert vals[:3] == ["32", "2", "16"]
    assert 0 < float(vals[4]) < 10


def test_quasimode_section_dump(tmp_path, capsys):
    target = tmp_path / "sec.json"
    code, _, _ = run(["quasimode", "--N", "4", "--j", "1", "--ntheta", "64", "--nphi", "8",
                      "--section", str(target)], capsys)
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["shape"] == [64, 8] and doc["k1"] == 2


def test_holonomy(capsys):
    code, out, _ = run(["holonomy", "--theta", str(math.pi / 2), "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert complex(doc["re"], doc["im"]) == pytest.approx(-1, abs=1e-12)


def test_output_file_and_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(io.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(["spectrum", "--N", "3", "--output", "sub/table.csv"], capsys)
    assert code == 0 and out == ""
    assert (tmp_path / "sub" / "table.csv").read_text().startswith("N,j,")


def test_io_error_exit_4(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["spectrum", "--N", "3", "--output", str(blocker / "t.csv")], capsys)[0] == 4
    assert run(["spectrum", "--config", str(tmp_path / "missing.ini")], capsys)[0] == 4


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("N = 10\njmax = 1\nformat = json\n")
    code, out, _ = run(["spectrum", "--config", str(cfg)], capsys)
    assert code == 0
    assert [r[0] for r in json.loads(out)["rows"]] == [10, 10]
    code, out, _ = run(["spectrum", "--config", str(cfg), "--N", "2", "--format", "csv"], capsys)
    assert out.splitlines()[1].startswith("2,0,")
    cfg.write_text("N = 10\ncolour = red\n")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 2


def test_verify_fault_injection(capsys):
    code, out, err = run(["verify", "--only", "1,2", "--inject-fault", "no-quarter"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["failed"] == ["correction term lambda_hat - lambda = 1/4"]
    assert "check failed: 1" in err


def test_verify_subset_passes(capsys):
    code, out, _ = run(["verify", "--only", "1,2,5,10", "--seed", "3"], capsys)
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_is_byte_deterministic(tmp_path):
    outputs = []
    for k in range(2):
        target = tmp_path / f"r{k}.json"
        main(["verify", "--only", "4,6,7,8", "--seed", "11", "--output", str(target)])
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]


def test_csv_formatting():
    text = io.render_csv(("a", "b", "c"), [(1, 0.1, None)])
    assert text == "a,b,c\n1,0.10000000000000001,\n"
    with pytest.raises(ValueError):
        io.render_csv(("a",), [(1, 2)])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "monopole_wkb.cli", "spectrum", "--N", "1", "--jmax", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "1,0,0.5" in res.stdout
