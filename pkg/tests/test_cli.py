import csv
import io
import json
import subprocess
import sys

import pytest

from qcc import __version__
from qcc.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_REJECTED, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_exponents_rows(capsys):
    doc = run_json(capsys, "exponents", "-P", "s=0.5", "-P", "p=2", "-P", "b=1")
    (row,) = doc["result"]
    assert row["q"] == "4/3" and row["regime"] == "subcritical"
    meta = doc["metadata"]
    assert meta["version"] == __version__ and meta["command"] == "exponents"
    assert len(meta["spec_hash"]) == 64 and isinstance(meta["seed"], int)


def test_exponents_critical(capsys):
    (row,) = run_json(capsys, "exponents", "-P", "s=1", "-P", "p=2")["result"]
    assert row["q"] == "2" and row["regime"] == "critical"


def test_exponents_planar(capsys):
    (row,) = run_json(capsys, "exponents", "-P", "K=2", "-P", "s=0.5", "-P", "p=2")["result"]
    assert (row["a_K"], row["b_K"]) == ("2", "1")
    assert row["bound"] == "1/q > 3/4"


def test_rejection_exit_code(capsys):
    code, _, err = run(capsys, "exponents", "-P", "s=0.5", "-P", "p=1.1", "-P", "b=0.1")
    assert code == EXIT_REJECTED and "q <= 1" in err


@pytest.mark.parametrize("argv", [
    ["exponents", "-P", "s=0.5", "-P", "p=1"],
    ["exponents", "-P", "s=0.5"],
    ["witness", "-P", "nonsense=1"],
    ["exponents", "-P", "s=0.5", "-P", "p=2", "--format", "svg"],
    ["suite", "-P", "slope_threshold=-0.1"],
])
def test_invalid_input_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INVALID and err.startswith("qcc: invalid input")


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("QCC_THREADS", "many")
    code, _, _ = run(capsys, "exponents", "-P", "s=1", "-P", "p=2")
    assert code == EXIT_INVALID


def test_spec_file_and_overrides(capsys, tmp_path):
    spec = tmp_path / "run.json"
    spec.write_text(json.dumps({
        "command": "witness",
        "params": {"regime": "subcritical", "s": 0.5, "p": 2, "q_prime": 1.5, "b": 1},
        "seed": 9,
    }))
    doc = run_json(capsys, "--spec", str(spec))
    assert doc["metadata"]["seed"] == 9
    assert doc["result"]["epsilon"]["fraction"] == "1/12"
    assert doc["result"]["all_hold"]
    # the same spec with a different seed hashes differently
    other = run_json(capsys, "--spec", str(spec), "--seed", "10")
    assert other["metadata"]["spec_hash"] != doc["metadata"]["spec_hash"]


def test_witness_infeasible_is_rejection(capsys):
    code, _, _ = run(capsys, "witness", "-P", "regime=subcritical", "-P", "s=0.5", "-P", "p=2",
                     "-P", "q_prime=4/3", "-P", "b=1")
    assert code == EXIT_REJECTED


def test_jacobian_csv(capsys):
    code, out, _ = run(capsys, "jacobian", "-P", "k=[2]", "-P", "t=[1,-0.5,-1]", "--tolerance", "1e-6")
    assert code == EXIT_OK
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert [r["t"] for r in rows] == ["1", "-1/2", "-1"]
    assert float(rows[0]["closed_form"]) == pytest.approx(3.141592653589793)
    assert rows[2]["closed_form"] == rows[2]["quadrature"] == "divergent"
    assert any(ln.startswith("# spec_hash=") for ln in out.splitlines())


def test_diagram_outputs(capsys, tmp_path):
    out = tmp_path / "fig.svg"
    code, _, _ = run(capsys, "diagram", "-P", "b=1", "-P", "sources=[[0.5, 2]]",
                     "-P", "index_for=[0.5, 2]", "--out", str(out))
    assert code == EXIT_OK
    text = out.read_text()
    assert text.startswith("<svg") and "spec_hash=" in text
    assert not list(tmp_path.glob(".qcc-*"))
    code, csv_text, _ = run(capsys, "diagram", "-P", "b=1", "-P", "sources=[[0.5, 2]]",
                            "-P", "index_for=[0.5, 2]", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO("\n".join(
        ln for ln in csv_text.splitlines() if not ln.startswith("#")))))
    pts = {r["label"]: r["inv_p_exact"] for r in rows if r["kind"] == "point"}
    assert pts == {"p0": "1/3", "q0": "2/3", "p1": "2/3", "q1": "5/6"}


def test_norms_command(capsys):
    doc = run_json(capsys, "norms", "-P", 'profile={"kind": "singular_power", "rho": 0.75}',
                   "-P", "s=0.5", "-P", "p=2")
    assert doc["result"]["verdict"] == "non-member"


def test_verify_command(capsys):
    doc = run_json(capsys, "verify", "-P", "regime=supercritical", "-P", "s=1", "-P", "p=4",
                   "-P", "q_prime=3", "-P", "a=2")
    assert doc["result"]["ok"]


def test_suite_subset(capsys):
    code, out, err = run(capsys, "suite", "-P", "criteria=[1,2,8]")
    assert code == EXIT_OK
    assert err.count("[PASS]") == 3
    assert json.loads(out)["result"]["passed"]


@pytest.mark.slow
def test_suite_zero_threshold_fails(capsys):
    code, _, err = run(capsys, "suite", "-P", "criteria=[5]", "-P", "slope_threshold=0")
    assert code == EXIT_FAILED
    assert "[FAIL] 5." in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qcc", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
