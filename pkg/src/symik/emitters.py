"""Artifact emission: LaTeX report, guarded Python and C++ solution code
rendered from the solution program, DOT dependency graph and JSON."""
from __future__ import annotations

import enum
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .exprcore import (Acos, Add, Asin, Atan2, Cos, Expr, Mul, Num, PiConst,
                       Pow, Sin, Sqrt, Sym, Tan)
from .exprcore.evaluate import CLAMP_EPS, ZERO_EPS
from .exprparse import _is_negative, _negate_term, print_expr
from .kinmodel import forward_kinematics
from .pipeline import SOLVER_TITLES, SolvedRobot
from .program import Op, Program
from .solgraph import SolutionGraph


class EmitTarget(enum.Enum):
    LATEX = "latex"
    PYTHON = "python"
    CPP = "cpp"
    DOT = "dot"
    JSON = "json"

    @property
    def suffix(self) -> str:
        return {"latex": "_report.tex", "python": "_ik.py", "cpp": "_ik.cpp",
                "dot": "_graph.dot", "json": "_solutions.json"}[self.value]


ALL_TARGETS = tuple(EmitTarget)


# ---------------------------------------------------------------- LaTeX

def _tex_name(name: str) -> str:
    if name in ("Px", "Py", "Pz"):
        return f"P_{{{name[1]}}}"
    stem, sep, idx = name.partition("_")
    stem = r"\theta" if stem == "th" else stem
    return f"{stem}_{{{idx}}}" if sep else stem


def _tex_atom(e: Expr) -> str:
    s = latex_expr(e)
    if isinstance(e, (Add, Mul)) or (isinstance(e, Num) and (e.value < 0 or e.value.denominator != 1)):
        return rf"\left({s}\right)"
    return s


def _tex_mul(coeff: Fraction, factors: Sequence[Expr]) -> str:
    num, den = [], []
    for f in factors:
        if isinstance(f, Pow) and f.exp < 0:
            den.append(_tex_atom(f.base) + (f"^{{{-f.exp}}}" if f.exp < -1 else ""))
        else:
            num.append(_tex_atom(f) if not isinstance(f, Pow) else latex_expr(f))
    sign = "-" if coeff < 0 else ""
    c = abs(coeff)
    if c.numerator != 1 or not num:
        num.insert(0, str(c.numerator))
    if c.denominator != 1:
        den.insert(0, str(c.denominator))
    top = r" \, ".join(num)
    if den:
        return sign + rf"\frac{{{top}}}{{{' '.join(den)}}}"
    return sign + top


def latex_expr(e: Expr) -> str:
    if isinstance(e, Num):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        return ("-" if v < 0 else "") + rf"\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
    if isinstance(e, PiConst):
        return r"\pi"
    if isinstance(e, Sym):
        return _tex_name(e.label)
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            if i == 0:
                parts.append(latex_expr(t))
            elif _is_negative(t):
                parts.append(" - " + latex_expr(_negate_term(t)))
            else:
                parts.append(" + " + latex_expr(t))
        return "".join(parts)
    if isinstance(e, Mul):
        if isinstance(e.args[0], Num):
            return _tex_mul(e.args[0].value, e.args[1:])
        return _tex_mul(Fraction(1), e.args)
    if isinstance(e, Pow):
        if e.exp < 0:
            return _tex_mul(Fraction(1), (e,))
        return f"{_tex_atom(e.base)}^{{{e.exp}}}"
    if isinstance(e, Sqrt):
        return rf"\sqrt{{{latex_expr(e.args[0])}}}"
    if isinstance(e, Atan2):
        return rf"\operatorname{{atan2}}\left({latex_expr(e.args[0])}, {latex_expr(e.args[1])}\right)"
    fn = {Sin: r"\sin", Cos: r"\cos", Tan: r"\tan", Asin: r"\arcsin", Acos: r"\arccos"}
    for cls, name in fn.items():
        if isinstance(e, cls):
            return rf"{name}\left({latex_expr(e.args[0])}\right)"
    raise TypeError(type(e).__name__)


def _tex_text(s: str) -> str:
    return s.replace("\\", r"\textbackslash{}").replace("_", r"\_").replace("&", r"\&").replace("#", r"\#")


def emit_latex(sr: SolvedRobot) -> str:
    r = sr.robot
    out = [r"\documentclass{article}",
           r"\usepackage{amsmath}",
           r"\usepackage[margin=2cm]{geometry}",
           r"\allowdisplaybreaks",
           r"\begin{document}",
           rf"\section*{{Inverse kinematics: {_tex_text(r.name)}}}",
           r"\subsection*{DH parameters}",
           r"\begin{tabular}{ccccc}",
           r"$i$ & $\alpha_{i-1}$ & $a_{i-1}$ & $d_i$ & $\theta_i$ \\ \hline"]
    for i, row in enumerate(r.rows, 1):
        cells = " & ".join(f"${latex_expr(x)}$" for x in (row.alpha, row.a, row.d, row.theta))
        out.append(rf"{i} & {cells} \\")
    out += [r"\end{tabular}", ""]
    symbolic = r"\text{symbolic}"
    consts = ", ".join(f"${_tex_name(k)} = {symbolic if v is None else repr(v)}$"
                       for k, v in r.constants.items())
    if consts:
        out += [rf"Constants: {consts}.", ""]
    out += [r"\subsection*{Forward kinematics}", r"\begin{align*}"]
    fk = forward_kinematics(r)[1]
    rows = []
    for i in range(3):
        for j in range(4):
            rows.append(rf"T_{{{i + 1}{j + 1}}} &= {latex_expr(fk[i][j])}")
    out.append(" \\\\\n".join(rows))
    out += [r"\end{align*}", "", r"\subsection*{Solutions}"]
    if not sr.outcome.fully_solved:
        names = ", ".join(f"${_tex_name(s.name)}$" for s in sr.outcome.unsolved)
        out += [rf"Not fully solved ({sr.outcome.kind.value}); unsolved: {names}.", ""]
    out.append(r"\begin{itemize}")
    for v in sr.solve_order:
        st = sr.state(v)
        title = SOLVER_TITLES.get(st.chosen.solver_name, st.chosen.solver_name)
        out.append(rf"\item ${_tex_name(v.name)}$, chosen solver: {_tex_text(title)}")
        out.append(r"\begin{align*}")
        out.append(" \\\\\n".join(rf"{_tex_name(i.symbol.label)} &= {latex_expr(i.expr)}"
                                  for i in st.instances))
        out.append(r"\end{align*}")
    out += [r"\end{itemize}", ""]
    if sr.poses:
        out += [r"\subsection*{Pose sets}", rf"{len(sr.poses)} pose sets.", r"\begin{enumerate}"]
        for ps in sr.poses:
            out.append(r"\item " + ", ".join(f"${_tex_name(l)}$" for l in ps.labels()))
        out += [r"\end{enumerate}", ""]
    if sr.graph is not None:
        out += [r"\subsection*{Solution graph}"]
        n_nodes = len(sr.graph.nodes)
        n_edges = sum(len(n.direct_parents) for n in sr.graph.nodes.values())
        shape = "a tree" if sr.graph.is_tree else "a graph (not a tree)"
        out.append(rf"The dependency graph has {n_nodes} nodes and {n_edges} edges and is {shape}.")
        notes = [(v, ps) for v, ps in sr.graph.multi_parent_variables().items()]
        if notes:
            out.append(r"\begin{itemize}")
            for v, ps in notes:
                par = ", ".join(f"${_tex_name(p.name)}$" for p in ps)
                out.append(rf"\item ${_tex_name(v.name)}$ has {len(ps)} independent parents: {par}")
            out.append(r"\end{itemize}")
        out.append("")
    out.append(r"\end{document}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- code

def _ident(name: str) -> str:
    return re.sub(r"\W", "_", name)


def _reg_names(prog: Program) -> Dict[int, str]:
    names = {i: _ident(n) for i, n in enumerate(prog.inputs)}
    for lab in prog.node_order:
        r = prog.outputs[lab]
        if r not in names:
            names[r] = _ident(lab)
    for k in range(prog.n_inputs, prog.n_regs):
        names.setdefault(k, f"v{k}")
    return names


def _pose_guards(prog: Program) -> List[List[int]]:
    out = []
    for labels in prog.pose_sets:
        gs = set()
        for lab in labels:
            gs |= prog.output_guards[lab]
        out.append(sorted(gs))
    return out


def _pose_values(prog: Program, names: Dict[int, str]) -> List[List[str]]:
    out = []
    for labels in prog.pose_sets:
        by_var = {prog.node_variable[l]: names[prog.outputs[l]] for l in labels}
        out.append([by_var[j] for j in prog.joints])
    return out


def _py_lines(prog: Program, names: Dict[int, str]) -> List[str]:
    lines = []
    for ins in prog.instrs:
        d = names[ins.dst]
        a = names.get(ins.a, "")
        b = names.get(ins.b, "")
        op = ins.op
        if op == Op.CONST:
            lines.append(f"{d} = {ins.imm!r}")
        elif op == Op.ADD:
            lines.append(f"{d} = {a} + {b}")
        elif op == Op.MUL:
            lines.append(f"{d} = {a} * {b}")
        elif op == Op.NEG:
            lines.append(f"{d} = -{a}")
        elif op == Op.POWI:
            lines.append(f"{d} = {a} ** {int(ins.imm)}")
        elif op in (Op.SIN, Op.COS, Op.TAN):
            lines.append(f"{d} = math.{op.name.lower()}({a})")
        else:
            g = ins.guard
            lines.append(f"{d} = 0.0")
            if op == Op.ATAN2:
                lines += [f"if abs({a}) > ZERO_EPS or abs({b}) > ZERO_EPS:",
                          f"    {d} = math.atan2({a}, {b})"]
            elif op in (Op.ASIN, Op.ACOS):
                lines += [f"if -1.0 - CLAMP_EPS <= {a} <= 1.0 + CLAMP_EPS:",
                          f"    {d} = math.{op.name.lower()}(min(1.0, max(-1.0, {a})))"]
            elif op == Op.SQRT:
                lines += [f"if {a} >= -CLAMP_EPS:",
                          f"    {d} = math.sqrt(max(0.0, {a}))"]
            elif op == Op.RECIP:
                lines += [f"if abs({a}) > ZERO_EPS:",
                          f"    {d} = 1.0 / {a}"]
            lines += ["else:", f"    g[{g}] = True"]
    return lines


def emit_python(sr: SolvedRobot) -> str:
    prog = sr.program
    names = _reg_names(prog)
    args = ", ".join(_ident(n) for n in prog.inputs)
    out = [f'"""Closed-form inverse kinematics for {sr.robot.name} (generated file)."""',
           "import math", "",
           f"JOINTS = {tuple(prog.joints)!r}",
           f"INPUTS = {tuple(prog.inputs)!r}",
           f"CLAMP_EPS = {CLAMP_EPS!r}",
           f"ZERO_EPS = {ZERO_EPS!r}", "", "",
           f"def solve({args}):",
           '    """Return one (joint values, reachable) pair per pose set.',
           "",
           "    Joint values follow JOINTS.  An unreachable pose set has",
           '    reachable == False and its values carry no meaning."""',
           f"    g = [False] * {max(prog.n_guards, 1)}"]
    out += ["    " + l for l in _py_lines(prog, names)]
    out.append("    poses = []")
    for vals, gs in zip(_pose_values(prog, names), _pose_guards(prog)):
        cond = " or ".join(f"g[{k}]" for k in gs) or "False"
        out.append(f"    q = ({', '.join(vals)},)")
        out.append(f"    ok = not ({cond}) and all(math.isfinite(x) for x in q)")
        out.append(f"    poses.append((q if ok else (0.0,) * {len(vals)}, ok))")
    out += ["    return poses", ""]
    return "\n".join(out)


def _cpp_lines(prog: Program, names: Dict[int, str]) -> List[str]:
    lines = []
    for ins in prog.instrs:
        d = names[ins.dst]
        a = names.get(ins.a, "")
        b = names.get(ins.b, "")
        op = ins.op
        if op == Op.CONST:
            lines.append(f"const double {d} = {ins.imm!r};")
        elif op == Op.ADD:
            lines.append(f"const double {d} = {a} + {b};")
        elif op == Op.MUL:
            lines.append(f"const double {d} = {a} * {b};")
        elif op == Op.NEG:
            lines.append(f"const double {d} = -{a};")
        elif op == Op.POWI:
            lines.append(f"const double {d} = std::pow({a}, {int(ins.imm)});")
        elif op in (Op.SIN, Op.COS, Op.TAN):
            lines.append(f"const double {d} = std::{op.name.lower()}({a});")
        else:
            g = ins.guard
            lines.append(f"double {d} = 0.0;")
            if op == Op.ATAN2:
                lines += [f"if (std::fabs({a}) > ZERO_EPS || std::fabs({b}) > ZERO_EPS) {{",
                          f"    {d} = std::atan2({a}, {b});"]
            elif op in (Op.ASIN, Op.ACOS):
                lines += [f"if ({a} >= -1.0 - CLAMP_EPS && {a} <= 1.0 + CLAMP_EPS) {{",
                          f"    {d} = std::{op.name.lower()}(std::fmin(1.0, std::fmax(-1.0, {a})));"]
            elif op == Op.SQRT:
                lines += [f"if ({a} >= -CLAMP_EPS) {{",
                          f"    {d} = std::sqrt(std::fmax(0.0, {a}));"]
            elif op == Op.RECIP:
                lines += [f"if (std::fabs({a}) > ZERO_EPS) {{",
                          f"    {d} = 1.0 / {a};"]
            lines += ["} else {", f"    g[{g}] = true;", "}"]
    return lines


def emit_cpp(sr: SolvedRobot) -> str:
    prog = sr.program
    names = _reg_names(prog)
    ns = _ident(sr.robot.name) + "_ik"
    nj = len(prog.joints)
    args = ", ".join(f"double {_ident(n)}" for n in prog.inputs)
    out = [f"// Closed-form inverse kinematics for {sr.robot.name} (generated file).",
           f"// Joint order: {', '.join(prog.joints)}",
           "#include <array>", "#include <cmath>", "#include <vector>", "",
           f"namespace {ns} {{", "",
           f"constexpr double CLAMP_EPS = {CLAMP_EPS!r};",
           f"constexpr double ZERO_EPS = {ZERO_EPS!r};", "",
           "struct PoseSet {",
           f"    std::array<double, {nj}> q;",
           "    bool reachable;",
           "};", "",
           f"inline std::vector<PoseSet> solve({args}) {{",
           f"    std::array<bool, {max(prog.n_guards, 1)}> g{{}};"]
    out += ["    " + l for l in _cpp_lines(prog, names)]
    out.append("    std::vector<PoseSet> poses;")
    for vals, gs in zip(_pose_values(prog, names), _pose_guards(prog)):
        cond = " || ".join(f"g[{k}]" for k in gs) or "false"
        out += ["    {",
                f"        PoseSet p{{{{{', '.join(vals)}}}, !({cond})}};",
                "        for (double x : p.q) p.reachable = p.reachable && std::isfinite(x);",
                "        if (!p.reachable) p.q.fill(0.0);",
                "        poses.push_back(p);",
                "    }"]
    out += ["    return poses;", "}", "", f"}}  // namespace {ns}", ""]
    return "\n".join(out)


def emit_solution_code(sr: SolvedRobot, target: EmitTarget) -> str:
    if target is EmitTarget.PYTHON:
        return emit_python(sr)
    if target is EmitTarget.CPP:
        return emit_cpp(sr)
    raise ValueError(f"{target} is not a code target")


_SITE = {
    EmitTarget.PYTHON: re.compile(r"math\.(asin|acos|sqrt|atan2)\(|1\.0 / "),
    EmitTarget.CPP: re.compile(r"std::(asin|acos|sqrt|atan2)\(|1\.0 / "),
}
_GUARD = re.compile(r"g\[\d+\] = (True|true)")


def guard_scan(text: str, target: EmitTarget) -> Tuple[int, int]:
    """(domain-sensitive sites, guards).  A site counts as guarded only when
    the line before it is a conditional; each guard is a flag assignment."""
    lines = text.splitlines()
    sites = guards = 0
    for i, line in enumerate(lines):
        n = len(_SITE[target].findall(line))
        if n:
            sites += n
            prev = lines[i - 1].strip() if i else ""
            if not prev.startswith("if"):
                guards -= n
        if _GUARD.search(line):
            guards += 1
    return sites, guards


# ---------------------------------------------------------------- DOT / JSON

def emit_graph_dot(graph: SolutionGraph, name: str = "solution") -> str:
    out = [f'digraph "{name}" {{']
    for v in graph.variables:
        for n in sorted(graph.by_variable(v), key=lambda n: n.branch_index):
            out.append(f'  "{n.label.label}";')
    for v in graph.variables:
        for n in sorted(graph.by_variable(v), key=lambda n: n.branch_index):
            for p in n.direct_parents:
                out.append(f'  "{n.label.label}" -> "{p.label}";')
    out.append("}")
    return "\n".join(out) + "\n"


def emit_json(sr: SolvedRobot) -> str:
    doc = {
        "robot": sr.robot.name,
        "outcome": sr.outcome.kind.value,
        "unknowns": [u.name for u in sr.robot.unknowns],
        "unsolved": [u.name for u in sr.outcome.unsolved],
        "solve_order": [v.name for v in sr.solve_order],
        "variables": [],
        "pose_sets": [ps.labels() for ps in sr.poses],
        "graph": None,
    }
    for v in sr.solve_order:
        st = sr.state(v)
        doc["variables"].append({
            "name": v.name,
            "solver": st.chosen.solver_name,
            "dependencies": sorted(d.name for d in st.chosen.dependencies),
            "branches": [{"label": i.symbol.label, "expression": print_expr(i.expr)}
                         for i in st.instances],
        })
    if sr.graph is not None:
        doc["graph"] = {
            "tree": sr.graph.is_tree,
            "nodes": [n.label.label for v in sr.graph.variables
                      for n in sorted(sr.graph.by_variable(v), key=lambda n: n.branch_index)],
            "edges": [[n.label.label, p.label] for v in sr.graph.variables
                      for n in sorted(sr.graph.by_variable(v), key=lambda n: n.branch_index)
                      for p in n.direct_parents],
            "multi_parent": {v.name: [p.name for p in ps]
                             for v, ps in sr.graph.multi_parent_variables().items()},
        }
    return json.dumps(doc, indent=2) + "\n"


def emit(sr: SolvedRobot, target: EmitTarget) -> str:
    if target is EmitTarget.LATEX:
        return emit_latex(sr)
    if target is EmitTarget.DOT:
        return emit_graph_dot(sr.graph, sr.robot.name)
    if target is EmitTarget.JSON:
        return emit_json(sr)
    return emit_solution_code(sr, target)


def needs_solution(target: EmitTarget) -> bool:
    return target in (EmitTarget.PYTHON, EmitTarget.CPP, EmitTarget.DOT)


def emit_all(sr: SolvedRobot, out_dir, targets: Iterable[EmitTarget] = ALL_TARGETS) -> List[Path]:
    """Write the requested artifacts; code and graph targets are skipped
    when the robot is not fully solved."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for t in targets:
        if needs_solution(t) and sr.program is None:
            continue
        p = out / (_ident(sr.robot.name) + t.suffix)
        p.write_text(emit(sr, t), encoding="utf-8")
        written.append(p)
    return written
