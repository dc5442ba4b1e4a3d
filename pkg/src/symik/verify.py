"""Numeric round-trip verification of solved robots and reachability flags."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .exprcore import DomainError, DomainKind, Kind, eval_numeric
from .kinmodel import Robot, numeric_fk, pose_bindings
from .solgraph import PoseSet, SolutionNode

ANGLE_TOL = 1e-4
DEFAULT_TOL = 1e-6
PRISMATIC_RANGE = (0.1, 2.0)

Bindings = Mapping[str, float]


@dataclass(frozen=True)
class DomainFlag:
    """``source`` is the node whose evaluation left the domain; it differs
    from ``node`` when the error was inherited from an ancestor."""

    node: str
    kind: DomainKind
    value: float
    source: str = ""

    def __str__(self) -> str:
        via = f" via {self.source}" if self.source and self.source != self.node else ""
        return f"{self.node}: {self.kind.name} ({self.value:.6g}){via}"


@dataclass
class PoseSetResult:
    labels: List[str]
    values: Dict[str, float]
    residual: float
    matches_seed: bool
    domain_errors: List[DomainFlag] = field(default_factory=list)

    @property
    def reachable(self) -> bool:
        return not self.domain_errors


@dataclass
class VerificationReport:
    seed: Dict[str, float]
    target: np.ndarray
    pose_sets: List[PoseSetResult]
    tol: float

    @property
    def max_residual(self) -> float:
        return max((p.residual for p in self.pose_sets), default=math.inf)

    @property
    def passed(self) -> bool:
        return (bool(self.pose_sets)
                and all(p.residual <= self.tol for p in self.pose_sets)
                and any(p.matches_seed for p in self.pose_sets))


def wrap_angle(x: float) -> float:
    """Reduce to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def angle_close(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return abs(wrap_angle(a - b)) <= tol


def _eval_nodes(nodes: Sequence[SolutionNode], b: Bindings,
                cache: Dict[str, Union[float, DomainFlag]]) -> Tuple[Dict[str, float], List[DomainFlag]]:
    """Evaluate one pose set's nodes in order; ``cache`` is shared between
    pose sets evaluated against the same bindings."""
    env = dict(b)
    values: Dict[str, float] = {}
    errs: List[DomainFlag] = []
    for n in nodes:
        lab = n.label.label
        if lab not in cache:
            bad = [cache[p.label] for p in n.direct_parents
                   if isinstance(cache.get(p.label), DomainFlag)]
            if bad:
                cache[lab] = DomainFlag(lab, bad[0].kind, bad[0].value, bad[0].source)
            else:
                try:
                    cache[lab] = eval_numeric(n.expression, env)
                except DomainError as exc:
                    cache[lab] = DomainFlag(lab, exc.kind, exc.value, lab)
        v = cache[lab]
        if isinstance(v, DomainFlag):
            errs.append(v)
            continue
        env[lab] = v
        values[n.variable.name] = v
    return values, errs


def check_reachability(poses: Sequence[PoseSet], bindings: Bindings) -> List[Optional[List[DomainFlag]]]:
    """Per pose set: ``None`` when reachable, else the domain errors hit."""
    cache: Dict[str, Union[float, DomainFlag]] = {}
    out = []
    for ps in poses:
        _, errs = _eval_nodes(ps.nodes, bindings, cache)
        out.append(errs or None)
    return out


def _matches(robot: Robot, values: Mapping[str, float], seed: Bindings, tol: float) -> bool:
    for u in robot.unknowns:
        if u.name not in values:
            return False
        a, b = values[u.name], seed[u.name]
        if u.kind == Kind.REVOLUTE:
            if not angle_close(a, b, tol):
                return False
        elif abs(a - b) > tol:
            return False
    return True


def verify_round_trip(robot: Robot, poses: Sequence[PoseSet], seed: Bindings,
                      tol: float = DEFAULT_TOL, angle_tol: float = ANGLE_TOL) -> VerificationReport:
    consts = {k: v for k, v in robot.constants.items() if v is not None}
    full = {**consts, **seed}
    target = numeric_fk(robot, full)
    b = {**{k: full[k] for k in robot.constants}, **pose_bindings(target)}
    cache: Dict[str, Union[float, DomainFlag]] = {}
    results = []
    for ps in poses:
        values, errs = _eval_nodes(ps.nodes, b, cache)
        joints = {u.name: values[u.name] for u in robot.unknowns if u.name in values}
        if errs or len(joints) != len(robot.unknowns):
            res = math.inf
        else:
            res = float(np.max(np.abs(numeric_fk(robot, {**full, **joints}) - target)))
        results.append(PoseSetResult(ps.labels(), joints, res,
                                     not errs and _matches(robot, joints, full, angle_tol), errs))
    return VerificationReport(dict(full), target, results, tol)


def random_seed(robot: Robot, rng: np.random.Generator,
                constants: Optional[Bindings] = None) -> Dict[str, float]:
    """Joint values for a random reachable pose plus the robot's constants.
    Angles are uniform in (-pi, pi], prismatic offsets in [0.1, 2.0]."""
    out: Dict[str, float] = {}
    for k, v in robot.constants.items():
        if constants and k in constants:
            out[k] = float(constants[k])
        elif v is None:
            raise ValueError(f"constant {k} has no value; pass it in constants")
        else:
            out[k] = v
    for u in robot.unknowns:
        if u.kind == Kind.PRISMATIC:
            out[u.name] = float(rng.uniform(*PRISMATIC_RANGE))
        else:
            out[u.name] = float(-rng.uniform(-math.pi, math.pi))
    return out


def fuzz(robot: Robot, poses: Sequence[PoseSet], n: int, seed: int = 0,
         tol: float = DEFAULT_TOL) -> List[VerificationReport]:
    rng = np.random.default_rng(seed)
    return [verify_round_trip(robot, poses, random_seed(robot, rng), tol) for _ in range(n)]
