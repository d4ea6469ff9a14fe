from __future__ import annotations

import json
import subprocess
import sys

import pytest

from kugabound import __version__
from kugabound.cli import check_family, main
from kugabound.invariants import load_family


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_genus3_fixture_is_consistent(capsys, genus3_path, tmp_path):
    report_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "check", str(genus3_path), "--json", str(report_path))
    assert code == 0
    assert out.startswith(f"# kugabound {__version__}\n")
    assert "q_f_inferred = 1" in out and "FAIL" not in out
    doc = json.loads(report_path.read_text())
    assert doc["status"] == "consistent"
    assert doc["derived"]["omega_sq"] == "12"


def test_genus4_fixture_reaches_the_upper_bound(genus4_path):
    report = check_family(load_family(genus4_path))
    assert report.status == "consistent"
    upper = next(c for c in report.checks if c.name.startswith("upper bound"))
    assert upper.slack == 0 and "Arakelov-sharp" in upper.note


def test_perturbed_fixture_is_violated(capsys, genus3_path, tmp_path):
    doc = json.loads(genus3_path.read_text())
    doc["fibers"][-1]["delta"] = {"1": 3}
    p = tmp_path / "perturbed.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "check", str(p))
    assert code == 1
    assert "status: violated" in out and "FAIL  Noether formula" in out


def test_wrong_stated_irregularity_fails(capsys, genus3_path, tmp_path):
    doc = json.loads(genus3_path.read_text())
    doc["q_f"] = 0
    p = tmp_path / "q0.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "check", str(p))
    assert code == 1 and "FAIL  Arakelov equality" in out
    code, out, _ = run(capsys, "check", str(p), "--no-arakelov")
    assert "Arakelov equality" not in out


@pytest.mark.parametrize("text, fragment", [
    ('{"genus": 3,', "line 1 column"),
    ('{"genus": 3, "base_genus": 0, "hyperelliptic": true, "fibers": [],'
     ' "lambda": 2}', "lambda"),
    ('{"genus": 3, "base_genus": 0, "hyperelliptic": true,'
     ' "fibers": [{"compact_jacobian": true, "delta": {"5": 1}}]}', "fibers/0"),
])
def test_malformed_input_exits_2(capsys, tmp_path, text, fragment):
    p = tmp_path / "bad.json"
    p.write_text(text)
    code, out, err = run(capsys, "check", str(p))
    assert code == 2 and out == ""
    assert err.startswith(f"error: {p}: ") and fragment in err


def test_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "nope.json"))
    assert code == 2 and "no such file" in err


@pytest.mark.parametrize("argv", [
    ["scan", "general", "--g-max", "1"],
    ["scan", "general", "--g-max", "x"],
    ["scan", "elliptic", "--g-max", "5"],
    ["scan", "general", "--g-max", "5", "--g-min", "6"],
    ["frobnicate"],
])
def test_bad_arguments_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_general_scan(capsys, tmp_path):
    certs = tmp_path / "c.json"
    code, out, _ = run(capsys, "scan", "general", "--g-max", "50", "--certificates", str(certs))
    assert code == 0
    assert out.splitlines()[-1] == "max feasible g = 4"
    assert "# column nc-nonempty q_f=0: max feasible g = 3" in out
    doc = json.loads(certs.read_text())
    assert doc["max_feasible_g"] == 4 and len(doc["cells"]) == 2 * 49


def test_small_hyperelliptic_scan_is_all_feasible(capsys):
    code, out, _ = run(capsys, "scan", "hyperelliptic", "--g-max", "3")
    rows = [line.split("\t") for line in out.splitlines() if line[:1].isdigit()]
    assert code == 0 and rows
    assert all(r[3] == "feasible" for r in rows)


def test_hyperelliptic_scan_regime_filter(capsys):
    code, out, _ = run(capsys, "scan", "hyperelliptic", "--g-max", "12", "--regime", "nc-nonempty")
    assert code == 0 and "nc-empty" not in out
    assert out.splitlines()[-1] == "max feasible g = 7"


def test_output_is_byte_identical(genus3_path):
    cmds = [[sys.executable, "-m", "kugabound", "check", str(genus3_path)],
            [sys.executable, "-m", "kugabound", "scan", "hyperelliptic", "--g-max", "9"]]
    for cmd in cmds:
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b and a


def test_parallel_scan_matches_serial(capsys):
    _, serial, _ = run(capsys, "scan", "hyperelliptic", "--g-max", "9")
    _, parallel, _ = run(capsys, "scan", "hyperelliptic", "--g-max", "9", "--jobs", "2")
    assert serial == parallel
