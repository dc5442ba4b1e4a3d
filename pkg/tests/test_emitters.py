import math
import re
import shutil
import subprocess

import numpy as np
import pytest

from symik.emitters import (EmitTarget, emit, emit_all, emit_graph_dot, emit_latex,
                            guard_scan, latex_expr)
from symik.kinmodel import builtin_robot, numeric_fk, pose_bindings, robot_from_dict
from symik.pipeline import solve
from symik.program import evaluate_poses
from symik.verify import random_seed, verify_round_trip

ROBOTS = ["puma", "chair_helper", "olson13", "planar2r"]


def _load_python(sr):
    ns = {}
    exec(compile(emit(sr, EmitTarget.PYTHON), f"{sr.robot.name}_ik.py", "exec"), ns)
    return ns


def _inputs(sr, b):
    return [b[n] for n in sr.program.inputs]


@pytest.mark.parametrize("target", list(EmitTarget))
def test_output_is_deterministic(solved, target):
    again = solve(builtin_robot("chair_helper"))
    assert emit(solved("chair_helper"), target) == emit(again, target)


@pytest.mark.parametrize("name", ROBOTS)
@pytest.mark.parametrize("target", [EmitTarget.PYTHON, EmitTarget.CPP])
def test_every_domain_site_is_guarded(solved, name, target):
    sites, guards = guard_scan(emit(solved(name), target), target)
    assert sites > 0 and guards >= sites
    assert sites == solved(name).program.n_guards


def test_guard_scan_catches_unguarded_site():
    text = "x = 1.0\nv = math.sqrt(x)\n"
    sites, guards = guard_scan(text, EmitTarget.PYTHON)
    assert sites == 1 and guards < sites


DOT_LINE = re.compile(r'^(digraph "[^"]+" \{|  "[^"]+";|  "[^"]+" -> "[^"]+";|\})$')


@pytest.mark.parametrize("name", ROBOTS)
def test_dot_grammar_and_edges(solved, name):
    sr = solved(name)
    text = emit_graph_dot(sr.graph, sr.robot.name)
    lines = text.splitlines()
    assert all(DOT_LINE.match(l) for l in lines), [l for l in lines if not DOT_LINE.match(l)]
    nodes = [l for l in lines if l.endswith('";') and "->" not in l]
    edges = {tuple(re.findall(r'"([^"]+)"', l)) for l in lines if "->" in l}
    assert len(nodes) == len(sr.graph.nodes)
    expected = {(k.label, p.label) for k, n in sr.graph.nodes.items() for p in n.direct_parents}
    assert edges == expected


def test_olson_theta5_nodes_have_two_parents(solved):
    text = emit_graph_dot(solved("olson13").graph)
    for lab in ("th_5s1", "th_5s2", "th_5s3", "th_5s4"):
        targets = re.findall(rf'"{lab}" -> "([^"]+)"', text)
        assert sorted(t.rsplit("s", 1)[0] for t in targets) == ["th_3", "th_4"]


def _balanced(tex):
    stack = []
    for kind, env in re.findall(r"\\(begin|end)\{([^}]+)\}", tex):
        if kind == "begin":
            stack.append(env)
        elif not stack or stack.pop() != env:
            return False
    return not stack and tex.count("{") == tex.count("}")


@pytest.mark.parametrize("name", ROBOTS)
def test_latex_is_balanced(solved, name):
    assert _balanced(emit_latex(solved(name)))


def test_latex_puma_content(solved):
    tex = emit_latex(solved("puma"))
    assert r"\item $\theta_{1}$, chosen solver: sinANDcos" in tex
    assert r"\item $\theta_{3}$, chosen solver: x2y2" in tex
    assert "8 pose sets." in tex
    assert tex.count("chosen solver:") == 7


def test_latex_single_joint_robot():
    r = robot_from_dict({"name": "one", "dh": [{"alpha": "0", "a": "0", "d": "0", "theta": "th_1"}],
                         "unknowns": ["th_1"]})
    tex = emit_latex(solve(r))
    assert _balanced(tex)
    assert tex.count(r"\item $\theta_{1}$") == 1


def test_latex_expr_forms():
    from symik.exprparse import parse_expr
    table = builtin_robot("puma").symbols
    assert latex_expr(parse_expr("atan2(Px, -Py)", table)) == r"\operatorname{atan2}\left(P_{x}, -P_{y}\right)"


@pytest.mark.parametrize("name", ROBOTS)
def test_python_code_matches_verification(solved, name):
    sr = solved(name)
    solve_fn = _load_python(sr)["solve"]
    rng = np.random.default_rng(3)
    for _ in range(10):
        seed = random_seed(sr.robot, rng)
        rep = verify_round_trip(sr.robot, sr.poses, seed)
        b = {**sr.robot.constants, **pose_bindings(rep.target)}
        got = solve_fn(*_inputs(sr, b))
        assert len(got) == len(rep.pose_sets)
        for (q, ok), ps in zip(got, rep.pose_sets):
            assert ok == ps.reachable
            if ok:
                for j, v in zip(sr.program.joints, q):
                    assert abs(v - ps.values[j]) <= 1e-10


def test_python_code_flags_unreachable_without_nan(solved):
    sr = solved("olson13")
    solve_fn = _load_python(sr)["solve"]
    r = sr.robot
    seed = random_seed(r, np.random.default_rng(0))
    b = {**r.constants, **pose_bindings(numeric_fk(r, seed))}
    b["Pz"] += 100.0  # pushes the asin argument far outside [-1, 1]
    got = solve_fn(*_inputs(sr, b))
    assert not any(ok for _, ok in got)
    assert all(math.isfinite(v) for q, _ in got for v in q)
    assert [e.reachable for e in evaluate_poses(sr.program, b)] == [False] * len(got)


@pytest.mark.skipif(shutil.which("g++") is None, reason="no C++ compiler")
def test_cpp_code_compiles_and_agrees(solved, tmp_path):
    sr = solved("puma")
    (tmp_path / "puma_ik.cpp").write_text(emit(sr, EmitTarget.CPP))
    r = sr.robot
    seed = random_seed(r, np.random.default_rng(9))
    b = {**r.constants, **pose_bindings(numeric_fk(r, seed))}
    args = ", ".join(repr(float(v)) for v in _inputs(sr, b))
    (tmp_path / "main.cpp").write_text(
        '#include <cstdio>\n#include "puma_ik.cpp"\nint main() {\n'
        f"    for (const auto& p : puma_ik::solve({args})) {{\n"
        '        std::printf("%d", p.reachable);\n'
        '        for (double x : p.q) std::printf(" %.17g", x);\n'
        '        std::printf("\\n");\n    }\n}\n')
    exe = tmp_path / "main"
    subprocess.run(["g++", "-std=c++17", "-O1", "-o", str(exe), str(tmp_path / "main.cpp")], check=True)
    rows = [l.split() for l in subprocess.run([str(exe)], capture_output=True, text=True,
                                              check=True).stdout.splitlines()]
    ref = _load_python(sr)["solve"](*_inputs(sr, b))
    assert len(rows) == len(ref) == 8
    for row, (q, ok) in zip(rows, ref):
        assert bool(int(row[0])) == ok
        assert all(abs(float(x) - y) <= 1e-10 for x, y in zip(row[1:], q))


def test_emit_all_writes_files(solved, tmp_path):
    paths = emit_all(solved("planar2r"), tmp_path)
    assert sorted(p.name for p in paths) == sorted(
        "planar2r" + t.suffix for t in EmitTarget)


def test_emit_all_skips_code_for_unsolved(tmp_path):
    r = robot_from_dict({"name": "t", "dh": [{"alpha": "0", "a": "1", "d": "0", "theta": "2*th_1"}],
                         "unknowns": ["th_1"]})
    paths = emit_all(solve(r), tmp_path)
    assert sorted(p.name for p in paths) == ["t_report.tex", "t_solutions.json"]
