import json
import subprocess
import sys

import pytest

from superflag import cli


def _run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version(capsys):
    code, out, _ = _run(["version"], capsys)
    assert code == 0 and out.startswith("superflag ")


def test_gr21_all_passes(capsys):
    code, out, _ = _run(["verify", "--pi-grassmannian", "2", "1", "--all", "--json", "-", "--no-timestamp"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["all_passed"]
    assert rep["checks"]["fields"]["dims"] == {"even": 4, "odd": 4}
    assert rep["checks"]["compare"]["exceptional_structure"]["passed"]
    assert "timestamp" not in rep


def test_json_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["verify", "--pi-grassmannian", "3", "1", "--all", "--json", str(p), "--no-timestamp"]) == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_timestamp_added_by_default(capsys):
    code, out, _ = _run(["verify", "--pi-grassmannian", "2", "1", "--checks", "kernel", "--json", "-"], capsys)
    rep = json.loads(out)
    assert code == 0 and "timestamp" in rep and "timings" in rep


def test_functions_check_text(capsys):
    code, out, _ = _run(["verify", "--pi-grassmannian", "3", "1", "--checks", "functions"], capsys)
    assert code == 0
    assert "functions dim 1" in out


def test_checks_run_in_fixed_order(capsys):
    code, out, _ = _run(
        ["verify", "--pi-grassmannian", "2", "1", "--checks", "kernel,cocycle", "--json", "-", "--no-timestamp"],
        capsys,
    )
    assert list(json.loads(out)["checks"]) == ["cocycle", "kernel"]


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "--pi-grassmannian", "2", "2", "--all"],
        ["verify", "--pi-flag", "3", "1,2", "--all"],
        ["verify", "--pi-flag", "3", "a,b", "--all"],
        ["verify", "--pi-flag", "x", "2,1", "--all"],
        ["verify", "--pi-grassmannian", "2", "1", "--checks", "bogus"],
        ["verify", "--pi-grassmannian", "2", "1", "--degree", "-1"],
        ["verify", "--checks", "kernel"],
    ],
)
def test_config_errors_exit_2(args, capsys):
    code, _, err = _run(args, capsys)
    assert code == 2 and "error" in err


def test_mismatch_exits_1(monkeypatch, capsys):
    monkeypatch.setitem(cli.PREDICTIONS, ("pi", 2, (1,)), {"dims": (8, 9), "exceptional": False})
    code, out, _ = _run(["verify", "--pi-grassmannian", "2", "1", "--checks", "fields"], capsys)
    assert code == 1 and "FAIL" in out


def test_prediction_rule_fallback():
    row = cli.predict(cli.FlagType.pi_grassmannian(5, 2))
    assert row["source"] == "rule" and tuple(row["dims"]) == (24, 25)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "superflag", "verify", "--pi-grassmannian", "2", "1", "--checks", "kernel"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr


@pytest.mark.slow
def test_flag_all(capsys):
    code, out, _ = _run(["verify", "--pi-flag", "3", "2,1", "--all", "--json", "-", "--no-timestamp"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["checks"]["fields"]["dims"] == {"even": 8, "odd": 9}
    assert rep["checks"]["vertical"]["dim"] == 0
    assert rep["checks"]["compare"]["isomorphic"]
