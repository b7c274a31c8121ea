import csv
import io
import json
import subprocess
import sys

import pytest

from padic_lab.cli import main, read_config_file
from padic_lab.errors import ConfigError
from padic_lab.suites import run_suite


def run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else None)


def test_passing_suite_exits_zero(tmp_path):
    code, data = run(tmp_path, "--suite", "constants")
    assert code == 0
    doc = json.loads(data)
    assert doc["meta"]["config"]["suites"] == ["constants"]
    assert all(r["pass"] for r in doc["rows"])
    assert all(r["micros"] is None for r in doc["rows"])


def test_failing_row_exits_one(tmp_path, capsys):
    # the literal closed-form constant is off by zeta(1), so this config has a red row
    code, data = run(tmp_path, "--suite", "fourier-kernel", "--p", "5", "--N", "3", "--N0", "1")
    assert code == 1
    rows = json.loads(data)["rows"]
    bad = [r["id"] for r in rows if not r["pass"]]
    assert bad == ["odd-q-closed-form"]
    assert "FAIL fourier-kernel odd-q-closed-form" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["--suite", "nonsense"],
    ["--p", "3", "--N", "3", "--N0", "2"],
    ["--p", "3", "--N", "4"],
    ["--p", "3", "--N", "4", "--N0", "1", "--precision", "3"],
    ["--p", "2", "--N", "4", "--N0", "1"],
    ["--threads", "0"],
    ["--N", "four", "--p", "3", "--N0", "1"],
])
def test_config_errors_exit_two(tmp_path, args, capsys):
    code, data = run(tmp_path, *args)
    assert code == 2 and data is None
    assert "padic-lab:" in capsys.readouterr().err


def test_main_term_hypothesis_enforced(tmp_path):
    code, _ = run(tmp_path, "--suite", "main-term", "--p", "3", "--N", "4", "--N0", "1", "--m", "2")
    assert code == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# constants only\nsuite = constants\nformat = csv\nD = 13\nq = 7\n")
    code, data = run(tmp_path, "--config", str(cfg), name="out.csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert any(json.loads(r["inputs"]) == {"D": 13, "q": 7} for r in rows)
    # flags override the file
    code, data = run(tmp_path, "--config", str(cfg), "--format", "json")
    assert json.loads(data)["meta"]["config"]["D"] == 13


def test_empty_config_file_is_valid(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("# nothing\n\n")
    assert read_config_file(str(cfg)) == {}
    code, _ = run(tmp_path, "--config", str(cfg), "--suite", "constants")
    assert code == 0


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(str(cfg))
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2


def test_formats_carry_the_same_rows(tmp_path):
    _, js = run(tmp_path, "--suite", "constants", "--format", "json")
    _, md = run(tmp_path, "--suite", "constants", "--format", "md", name="out.md")
    rows_js = sorted((r["id"], json.dumps(r["inputs"], sort_keys=True), r["lhs"], r["rhs"], str(r["pass"]))
                     for r in json.loads(js)["rows"])
    body = [l for l in md.decode().splitlines() if l.startswith("| ") and not l.startswith("| suite")]
    rows_md = sorted(tuple(c.strip() for c in l.strip("|").split(" | "))[1:6] for l in body)
    assert rows_js == rows_md


def test_timing_flag(tmp_path):
    _, data = run(tmp_path, "--suite", "constants", "--timing")
    assert all(isinstance(r["micros"], int) for r in json.loads(data)["rows"])


def test_run_suite_api():
    rep = run_suite("constants")
    assert rep.passed and len(rep.rows) == 75
    with pytest.raises(ConfigError):
        run_suite("bogus")
    with pytest.raises(ConfigError):
        run_suite("constants", colour=1)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "padic_lab", "--suite", "constants", "--format", "md"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("<!-- ")
