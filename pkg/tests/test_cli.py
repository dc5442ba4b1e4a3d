import json
import subprocess
import sys

import pytest

from symik.cli import EXIT_INPUT, EXIT_OK, EXIT_PARTIAL, EXIT_VERIFY, main
from symik.kinmodel import builtin_robot_path


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_puma_summary(capsys, tmp_path):
    code, out, _ = run(capsys, "--robot", "puma", "--out", str(tmp_path), "--emit", "json")
    assert code == EXIT_OK
    assert "outcome: FullySolved" in out
    assert "8 pose sets" in out
    assert "graph: tree" in out
    assert "θ₁     sinANDcos" in out
    assert (tmp_path / "puma_solutions.json").exists()
    assert not (tmp_path / "puma_ik.py").exists()


def test_olson_not_tree(capsys, tmp_path):
    code, out, _ = run(capsys, "--robot", builtin_robot_path("olson13"), "--out", str(tmp_path),
                       "--emit", "dot", "--verify", "20")
    assert code == EXIT_OK
    assert "graph (not tree): θ₅ has 2 independent parents (θ₃, θ₄)" in out
    assert "verification: 20/20 seeds passed" in out


def test_verify_failure_exit_code(capsys, tmp_path):
    code, out, _ = run(capsys, "--robot", "chair_helper", "--out", str(tmp_path), "--emit", "json",
                       "--verify", "5", "--tol", "-1")
    assert code == EXIT_VERIFY
    assert "verification: 0/5" in out


def test_iteration_limit_is_partial(capsys, tmp_path):
    code, out, _ = run(capsys, "--robot", "olson13", "--out", str(tmp_path), "--max-iterations", "2")
    assert code == EXIT_PARTIAL
    assert "IterationLimit" in out and "unsolved:" in out
    # no code or graph for an unsolved robot
    assert sorted(p.name for p in tmp_path.iterdir()) == ["olson13_report.tex", "olson13_solutions.json"]


def test_unmatched_robot_is_partial(capsys, tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"name": "t", "dh": [{"alpha": "0", "a": "1", "d": "0", "theta": "2*th_1"}],
                             "unknowns": ["th_1"]}))
    code, out, _ = run(capsys, "--robot", str(p), "--out", str(tmp_path / "o"))
    assert code == EXIT_PARTIAL and "PartiallySolved" in out


@pytest.mark.parametrize("args", [
    ["--robot", "nope.json"],
    ["--robot", "puma", "--emit", "pdf"],
    ["--robot", "puma", "--seed", "-1"],
    ["--robot", "puma", "--verify", "-3"],
    ["--robot", "puma", "--max-iterations", "0"],
    [],
])
def test_input_errors_exit_1(capsys, args):
    # usage errors leave through argparse, load errors return
    try:
        code = main(args)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_INPUT


def test_seven_row_robot_rejected(capsys, tmp_path):
    p = tmp_path / "r.json"
    row = {"alpha": "0", "a": "0", "d": "0", "theta": "th_1"}
    p.write_text(json.dumps({"name": "t", "dh": [row] * 7, "unknowns": ["th_1"]}))
    code, _, err = run(capsys, "--robot", str(p))
    assert code == EXIT_INPUT and "1-6 DH rows" in err


def test_verify_needs_numeric_constants(capsys, tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"name": "t", "dh": [{"alpha": "0", "a": "l_1", "d": "0", "theta": "th_1"}],
                             "unknowns": ["th_1"], "constants": {"l_1": None}}))
    code, _, err = run(capsys, "--robot", str(p), "--verify", "3")
    assert code == EXIT_INPUT and "l_1" in err


def test_unwritable_output(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "--robot", "planar2r", "--out", str(blocker / "sub"))
    assert code == EXIT_INPUT and "cannot write" in err


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "symik.cli", "--robot", "planar2r", "--out", str(tmp_path),
                          "--emit", "python,cpp"], capture_output=True, text=True)
    assert out.returncode == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["planar2r_ik.cpp", "planar2r_ik.py"]
