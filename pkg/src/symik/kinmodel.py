"""Symbolic forward kinematics and the family of matrix / scalar equations.

Link transforms follow the modified (proximal) DH convention, where link i is
described by ``alpha_{i-1}, a_{i-1}, d_i, theta_i``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib.resources import files
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .exprcore import (ONE, ZERO, Cos, Expr, Kind, Sin, Sym, canonicalize,
                       contract_angle_sums, eval_numeric, free_symbols)
from .exprcore.expr import Mul, Num, _is_negative_leading, to_poly

Mat4 = Tuple[Tuple[Expr, ...], ...]

POSE_NAMES = ("r_11", "r_12", "r_13", "Px",
              "r_21", "r_22", "r_23", "Py",
              "r_31", "r_32", "r_33", "Pz")


class RobotDefinitionError(ValueError):
    pass


def pose_symbols() -> Dict[str, Sym]:
    return {n: Sym(n, Kind.POSE) for n in POSE_NAMES}


@dataclass(frozen=True)
class DHRow:
    alpha: Expr
    a: Expr
    d: Expr
    theta: Expr

    def joint(self) -> Optional[Sym]:
        js = [s for s in free_symbols(self.d) | free_symbols(self.theta) if s.is_joint]
        return js[0] if js else None


@dataclass
class Robot:
    name: str
    rows: List[DHRow]
    unknowns: List[Sym]
    constants: Dict[str, Optional[float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= len(self.rows) <= 6:
            raise RobotDefinitionError(f"{self.name}: expected 1-6 DH rows, got {len(self.rows)}")
        found = []
        for i, row in enumerate(self.rows, 1):
            for what in (row.alpha, row.a):
                if any(s.is_joint for s in free_symbols(what)):
                    raise RobotDefinitionError(f"link {i}: alpha/a must not contain joint variables")
            js = {s for s in free_symbols(row.d) | free_symbols(row.theta) if s.is_joint}
            if len(js) > 1:
                raise RobotDefinitionError(f"link {i}: more than one joint variable")
            found.extend(js)
        if [s.name for s in found] != [s.name for s in self.unknowns]:
            raise RobotDefinitionError(
                f"unknowns {[s.name for s in self.unknowns]} do not match joint "
                f"variables in link order {[s.name for s in found]}")

    @property
    def symbols(self) -> Dict[str, Sym]:
        table = pose_symbols()
        for n in self.constants:
            table[n] = Sym(n, Kind.CONSTANT)
        for u in self.unknowns:
            table[u.name] = u
        return table

    @property
    def dof(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------- matrices

def identity() -> Mat4:
    return tuple(tuple(ONE if i == j else ZERO for j in range(4)) for i in range(4))


def simplify_entry(e: Expr) -> Expr:
    return contract_angle_sums(canonicalize(e))


def mat_mul(a: Mat4, b: Mat4) -> Mat4:
    from .exprcore import Add
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            terms = [Mul((a[i][k], b[k][j])) for k in range(4)
                     if not a[i][k].is_zero and not b[k][j].is_zero]
            row.append(simplify_entry(Add(terms)) if terms else ZERO)
        rows.append(tuple(row))
    return tuple(rows)


def dh_link_transform(row: DHRow) -> Mat4:
    ca, sa = canonicalize(Cos(row.alpha)), canonicalize(Sin(row.alpha))
    ct, st = canonicalize(Cos(row.theta)), canonicalize(Sin(row.theta))
    m = [
        [ct, -st, ZERO, row.a],
        [st * ca, ct * ca, -sa, -sa * row.d],
        [st * sa, ct * sa, ca, ca * row.d],
        [ZERO, ZERO, ZERO, ONE],
    ]
    return tuple(tuple(canonicalize(x) for x in r) for r in m)


def homogeneous_inverse(t: Mat4) -> Mat4:
    """[R p; 0 1]^-1 = [R^T  -R^T p; 0 1]."""
    rows = []
    for i in range(3):
        r = [t[j][i] for j in range(3)]
        p = -(t[0][i] * t[0][3] + t[1][i] * t[1][3] + t[2][i] * t[2][3])
        rows.append(tuple(simplify_entry(x) for x in r + [p]))
    rows.append((ZERO, ZERO, ZERO, ONE))
    return tuple(rows)


def chain(ts: Sequence[Mat4]) -> Mat4:
    out = identity()
    for t in ts:
        out = mat_mul(out, t)
    return out


def forward_kinematics(robot: Robot) -> Tuple[List[Mat4], Mat4]:
    per_link = [dh_link_transform(r) for r in robot.rows]
    return per_link, chain(per_link)


def pose_matrix() -> Mat4:
    ps = pose_symbols()
    rows = [tuple(ps[POSE_NAMES[4 * i + j]] for j in range(4)) for i in range(3)]
    rows.append((ZERO, ZERO, ZERO, ONE))
    return tuple(rows)


@dataclass(frozen=True)
class MatrixEquation:
    lhs: Mat4
    rhs: Mat4
    depth: int


def build_matrix_equations(robot: Robot, per_link: Optional[List[Mat4]] = None) -> List[MatrixEquation]:
    """Depth k premultiplies both sides of T_d = T_s by the inverses of the
    first k link transforms."""
    if per_link is None:
        per_link, _ = forward_kinematics(robot)
    n = len(per_link)
    out = []
    lhs = pose_matrix()
    for k in range(n):
        if k:
            lhs = mat_mul(homogeneous_inverse(per_link[k - 1]), lhs)
        out.append(MatrixEquation(lhs, chain(per_link[k:]), k))
    return out


# ---------------------------------------------------------------- scalar equations

@dataclass(frozen=True)
class ScalarEquation:
    """``lhs`` comes from the desired-pose side, ``rhs`` from the chain side."""

    lhs: Expr
    rhs: Expr
    unknowns: FrozenSet[Sym] = frozenset()
    origin: str = ""

    @property
    def residual(self) -> Expr:
        return canonicalize(self.rhs - self.lhs)

    def reclassified(self, unsolved: Iterable[Sym]) -> "ScalarEquation":
        u = (free_symbols(self.lhs) | free_symbols(self.rhs)) & frozenset(unsolved)
        return ScalarEquation(self.lhs, self.rhs, u, self.origin)

    def __str__(self):
        from .exprparse import print_expr
        return f"{print_expr(self.lhs)} = {print_expr(self.rhs)}"


def signless_key(e: Expr) -> Expr:
    e = canonicalize(e)
    if _is_negative_leading(to_poly(e)):
        return canonicalize(Mul((Num(-1), e)))
    return e


@dataclass
class Buckets:
    one: List[ScalarEquation] = field(default_factory=list)
    two: List[ScalarEquation] = field(default_factory=list)
    more: List[ScalarEquation] = field(default_factory=list)

    def all(self) -> List[ScalarEquation]:
        return self.one + self.two + self.more

    def snapshot(self) -> tuple:
        return tuple((e.lhs, e.rhs, e.unknowns) for e in self.all())


def classify(eqs: Iterable[ScalarEquation], unsolved: Iterable[Sym]) -> Buckets:
    """Reclassify, dropping tautologies and sign-duplicates (first wins)."""
    unsolved = frozenset(unsolved)
    b = Buckets()
    seen = set()
    for e in eqs:
        key = signless_key(e.residual)
        if key.is_zero or key in seen:
            continue
        seen.add(key)
        e = e.reclassified(unsolved)
        n = len(e.unknowns)
        if n == 0:
            continue
        (b.one if n == 1 else b.two if n == 2 else b.more).append(e)
    return b


def extract_and_classify(meqs: Sequence[MatrixEquation], unsolved: Iterable[Sym]) -> Buckets:
    eqs = []
    for me in meqs:
        for i in range(3):
            for j in range(4):
                eqs.append(ScalarEquation(me.lhs[i][j], me.rhs[i][j],
                                          origin=f"depth{me.depth}[{i + 1},{j + 1}]"))
    return classify(eqs, unsolved)


# ---------------------------------------------------------------- numeric side

def numeric_link(row: DHRow, values: Mapping[str, float]) -> np.ndarray:
    al = eval_numeric(row.alpha, values)
    a = eval_numeric(row.a, values)
    d = eval_numeric(row.d, values)
    th = eval_numeric(row.theta, values)
    ca, sa, ct, st = np.cos(al), np.sin(al), np.cos(th), np.sin(th)
    return np.array([
        [ct, -st, 0.0, a],
        [st * ca, ct * ca, -sa, -sa * d],
        [st * sa, ct * sa, ca, ca * d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def numeric_fk(robot: Robot, values: Mapping[str, float]) -> np.ndarray:
    """End-effector transform for joint and constant values keyed by name."""
    t = np.eye(4)
    for row in robot.rows:
        t = t @ numeric_link(row, values)
    return t


def pose_bindings(t: np.ndarray) -> Dict[str, float]:
    return {POSE_NAMES[4 * i + j]: float(t[i, j]) for i in range(3) for j in range(4)}


# ---------------------------------------------------------------- robot files

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def robot_from_dict(doc: Mapping) -> Robot:
    """Build a :class:`Robot` from the JSON robot-file document."""
    from .exprparse import ExprSyntaxError, UnknownIdentifier, parse_expr

    try:
        name = str(doc["name"])
        rows = list(doc["dh"])
        unknown_names = [str(u) for u in doc["unknowns"]]
        constants = dict(doc.get("constants") or {})
    except (KeyError, TypeError) as exc:
        raise RobotDefinitionError(f"malformed robot file: {exc}") from None
    if not 1 <= len(rows) <= 6:
        raise RobotDefinitionError(f"{name}: expected 1-6 DH rows, got {len(rows)}")

    kinds: Dict[str, Kind] = {}
    for i, row in enumerate(rows, 1):
        for fld, kind in (("d", Kind.PRISMATIC), ("theta", Kind.REVOLUTE)):
            for ident in _IDENT.findall(str(row.get(fld, ""))):
                if ident in unknown_names:
                    if ident in kinds:
                        raise RobotDefinitionError(f"unknown {ident} appears in more than one DH slot")
                    kinds[ident] = kind
    missing = [u for u in unknown_names if u not in kinds]
    if missing:
        raise RobotDefinitionError(f"unknowns never appear in d or theta: {missing}")
    clash = set(unknown_names) & set(constants)
    if clash:
        raise RobotDefinitionError(f"names declared as both unknown and constant: {sorted(clash)}")
    for v in constants.values():
        if v is not None and not isinstance(v, (int, float)):
            raise RobotDefinitionError(f"constant values must be numbers or null, got {v!r}")

    table = pose_symbols()
    for c in constants:
        table[c] = Sym(c, Kind.CONSTANT)
    syms = {u: Sym(u, kinds[u]) for u in unknown_names}
    table.update(syms)

    dh = []
    for i, row in enumerate(rows, 1):
        vals = []
        for fld in ("alpha", "a", "d", "theta"):
            text = str(row.get(fld, "0"))
            try:
                e = parse_expr(text, table)
            except (ExprSyntaxError, UnknownIdentifier) as exc:
                raise RobotDefinitionError(f"link {i} {fld}: {exc}") from None
            if any(s.kind == Kind.POSE for s in free_symbols(e)):
                raise RobotDefinitionError(f"link {i} {fld}: pose elements are not allowed in DH parameters")
            vals.append(e)
        dh.append(DHRow(*vals))
    order = [row.joint() for row in dh]
    unknowns = [u for u in order if u is not None]
    if sorted(u.name for u in unknowns) != sorted(unknown_names):
        raise RobotDefinitionError("every unknown must appear in exactly one row")
    return Robot(name, dh, unknowns,
                 {k: (None if v is None else float(v)) for k, v in constants.items()})


def load_robot(path) -> Robot:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RobotDefinitionError(f"{path}: invalid JSON: {exc}") from None
    return robot_from_dict(doc)


def builtin_robot_path(name: str) -> str:
    """Path of a bundled fixture (``puma``, ``chair_helper``, ``olson13``, ``planar2r``)."""
    return str(files("symik").joinpath("robots", f"{name}.json"))


def builtin_robot(name: str) -> Robot:
    return load_robot(builtin_robot_path(name))
