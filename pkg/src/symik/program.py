"""Language-neutral solution IR: a flat SSA program with guarded intrinsics.

Every emitted code target and the batch evaluator run the same instruction
list.  Registers ``0 .. n_inputs-1`` hold the inputs (the twelve pose
numbers followed by the robot constants); each instruction writes one new
register.  Guarded instructions (asin, acos, sqrt, reciprocal, atan2) raise
a per-site flag instead of producing NaN or infinity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Sequence, Tuple

import numpy as np

from .exprcore import (Acos, Add, Asin, Atan2, Cos, Expr, Mul, Num,
                       PiConst, Pow, Sin, Sqrt, Sym, Tan)
from .exprcore.evaluate import CLAMP_EPS, ZERO_EPS
from .kinmodel import POSE_NAMES, Robot
from .solgraph import PoseSet, SolutionGraph


class Op(enum.IntEnum):
    CONST = 0
    ADD = 1
    MUL = 2
    NEG = 3
    POWI = 4
    SIN = 5
    COS = 6
    TAN = 7
    ATAN2 = 8
    ASIN = 9
    ACOS = 10
    SQRT = 11
    RECIP = 12


GUARDED = frozenset({Op.ATAN2, Op.ASIN, Op.ACOS, Op.SQRT, Op.RECIP})


@dataclass(frozen=True)
class Instr:
    op: Op
    dst: int
    a: int = -1
    b: int = -1
    imm: float = 0.0
    guard: int = -1


@dataclass
class Program:
    inputs: List[str]
    instrs: List[Instr]
    n_regs: int
    outputs: Dict[str, int]
    output_guards: Dict[str, FrozenSet[int]]
    node_order: List[str]
    node_variable: Dict[str, str]
    joints: List[str]
    pose_sets: List[List[str]]
    n_guards: int
    guard_kind: List[Op] = field(default_factory=list)

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def arrays(self) -> Tuple[np.ndarray, ...]:
        ins = self.instrs
        return (np.array([int(i.op) for i in ins], dtype=np.int32),
                np.array([i.dst for i in ins], dtype=np.int32),
                np.array([i.a for i in ins], dtype=np.int32),
                np.array([i.b for i in ins], dtype=np.int32),
                np.array([i.imm for i in ins], dtype=np.float64),
                np.array([i.guard for i in ins], dtype=np.int32))

    def input_vector(self, bindings: Mapping[str, float]) -> List[float]:
        return [float(bindings[n]) for n in self.inputs]


class _Compiler:
    def __init__(self, inputs: Sequence[str]):
        self.inputs = list(inputs)
        self.reg_of: Dict[str, int] = {n: i for i, n in enumerate(inputs)}
        self.instrs: List[Instr] = []
        self.memo: Dict[Expr, int] = {}
        self.guards_of: Dict[int, FrozenSet[int]] = {i: frozenset() for i in range(len(inputs))}
        self.guard_kind: List[Op] = []
        self.n = len(inputs)

    def emit(self, op: Op, a: int = -1, b: int = -1, imm: float = 0.0) -> int:
        dst = self.n
        self.n += 1
        g = -1
        deps = frozenset()
        for r in (a, b):
            if r >= 0:
                deps |= self.guards_of[r]
        if op in GUARDED:
            g = len(self.guard_kind)
            self.guard_kind.append(op)
            deps |= {g}
        self.guards_of[dst] = deps
        self.instrs.append(Instr(op, dst, a, b, float(imm), g))
        return dst

    def fold(self, op: Op, regs: List[int]) -> int:
        acc = regs[0]
        for r in regs[1:]:
            acc = self.emit(op, acc, r)
        return acc

    def expr(self, e: Expr) -> int:
        hit = self.memo.get(e)
        if hit is not None:
            return hit
        r = self._expr(e)
        self.memo[e] = r
        return r

    def _expr(self, e: Expr) -> int:
        if isinstance(e, Num):
            return self.emit(Op.CONST, imm=float(e.value))
        if isinstance(e, PiConst):
            return self.emit(Op.CONST, imm=math.pi)
        if isinstance(e, Sym):
            key = e.label
            if key not in self.reg_of:
                raise KeyError(f"symbol {key} is neither an input nor an earlier node")
            return self.reg_of[key]
        if isinstance(e, Add):
            return self.fold(Op.ADD, [self.expr(a) for a in e.args])
        if isinstance(e, Mul):
            args = list(e.args)
            if isinstance(args[0], Num) and args[0].value == -1 and len(args) > 1:
                rest = args[1] if len(args) == 2 else Mul(tuple(args[1:]))
                return self.emit(Op.NEG, self.expr(rest))
            return self.fold(Op.MUL, [self.expr(a) for a in args])
        if isinstance(e, Pow):
            base = self.expr(e.base)
            if e.exp >= 0:
                return self.emit(Op.POWI, base, imm=e.exp)
            p = base if e.exp == -1 else self.emit(Op.POWI, base, imm=-e.exp)
            return self.emit(Op.RECIP, p)
        unary = {Sin: Op.SIN, Cos: Op.COS, Tan: Op.TAN, Asin: Op.ASIN, Acos: Op.ACOS, Sqrt: Op.SQRT}
        for cls, op in unary.items():
            if isinstance(e, cls):
                return self.emit(op, self.expr(e.args[0]))
        if isinstance(e, Atan2):
            return self.emit(Op.ATAN2, self.expr(e.args[0]), self.expr(e.args[1]))
        raise TypeError(f"cannot compile {type(e).__name__}")


def compile_program(robot: Robot, graph: SolutionGraph, poses: Sequence[PoseSet]) -> Program:
    """Lower the solved graph to one program computing every branch node."""
    inputs = list(POSE_NAMES) + list(robot.constants)
    c = _Compiler(inputs)
    outputs: Dict[str, int] = {}
    guards: Dict[str, FrozenSet[int]] = {}
    order: List[str] = []
    var_of: Dict[str, str] = {}
    for v in graph.variables:
        for n in sorted(graph.by_variable(v), key=lambda n: n.branch_index):
            lab = n.label.label
            r = c.expr(n.expression)
            c.reg_of[lab] = r
            outputs[lab] = r
            guards[lab] = c.guards_of[r]
            order.append(lab)
            var_of[lab] = v.name
    sets = [[n.label.label for n in ps.nodes] for ps in poses]
    return Program(inputs, c.instrs, c.n, outputs, guards, order, var_of,
                   [u.name for u in robot.unknowns], sets, len(c.guard_kind), c.guard_kind)


# ---------------------------------------------------------------- evaluation

def _select_backend():
    import os
    if os.environ.get("SYMIK_PURE_PYTHON"):
        from . import _evalcore_py as mod
        return mod, "python"
    try:
        from . import _evalcore as mod  # type: ignore[attr-defined]
        return mod, "cython"
    except ImportError:
        from . import _evalcore_py as mod
        return mod, "python"


_kernel, BACKEND = _select_backend()


def run_batch(prog: Program, x: np.ndarray, kernel=None) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate ``prog`` on each row of ``x`` (shape ``(N, n_inputs)``).
    Returns the node outputs ``(N, n_nodes)`` in ``prog.node_order`` and the
    guard flags ``(N, n_guards)``."""
    k = kernel or _kernel
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != prog.n_inputs:
        raise ValueError(f"expected shape (N, {prog.n_inputs}), got {x.shape}")
    ops, dst, a, b, imm, guard = prog.arrays()
    outs = np.array([prog.outputs[l] for l in prog.node_order], dtype=np.int32)
    return k.run_batch(ops, dst, a, b, imm, guard, prog.n_regs, prog.n_guards, outs, x,
                       CLAMP_EPS, ZERO_EPS)


@dataclass
class PoseEvaluation:
    values: Dict[str, float]
    reachable: bool


def evaluate_poses(prog: Program, bindings: Mapping[str, float], kernel=None) -> List[PoseEvaluation]:
    vals, flags = run_batch(prog, np.array([prog.input_vector(bindings)]), kernel)
    vals, flags = vals[0], flags[0]
    col = {l: i for i, l in enumerate(prog.node_order)}
    out = []
    for labels in prog.pose_sets:
        ok = True
        v: Dict[str, float] = {}
        for lab in labels:
            x = float(vals[col[lab]])
            if any(flags[g] for g in prog.output_guards[lab]) or not math.isfinite(x):
                ok = False
            v[prog.node_variable[lab]] = x
        out.append(PoseEvaluation({j: v[j] for j in prog.joints if j in v}, ok))
    return out
