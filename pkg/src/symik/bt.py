"""A small behavior-tree engine and the solving loop built on it."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .exprcore import Sym
from .kinmodel import (Buckets, Robot, build_matrix_equations, classify,
                       extract_and_classify, forward_kinematics)
from .rewrite import (SumOfAngleRecord, apply_substitution, apply_sum_of_angle,
                      retire_sums)
from .solvers import (SOLVERS, CandidateSolution, SolveContext, UnknownState,
                      expand_candidate, rank_candidates)

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 10


class Status(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


SUCCESS, FAILURE = Status.SUCCESS, Status.FAILURE


class BTNode:
    name = ""

    def tick(self, bb: "Blackboard") -> Status:
        raise NotImplementedError


class Sequence_(BTNode):
    def __init__(self, children: Sequence[BTNode], name: str = "sequence"):
        self.children = list(children)
        self.name = name

    def tick(self, bb):
        for c in self.children:
            if c.tick(bb) is FAILURE:
                return FAILURE
        return SUCCESS


class Selector(BTNode):
    def __init__(self, children: Sequence[BTNode], name: str = "selector"):
        self.children = list(children)
        self.name = name

    def tick(self, bb):
        for c in self.children:
            if c.tick(bb) is SUCCESS:
                return SUCCESS
        return FAILURE


class Parallel(BTNode):
    """Ticks every child; succeeds if any child succeeded."""

    def __init__(self, children: Sequence[BTNode], name: str = "parallel"):
        self.children = list(children)
        self.name = name

    def tick(self, bb):
        results = [c.tick(bb) for c in self.children]
        return SUCCESS if SUCCESS in results else FAILURE


class Succeeder(BTNode):
    def __init__(self, child: BTNode, name: str = "succeeder"):
        self.child = child
        self.name = name

    def tick(self, bb):
        self.child.tick(bb)
        return SUCCESS


class Action(BTNode):
    def __init__(self, name: str, fn: Callable[["Blackboard"], bool]):
        self.name = name
        self.fn = fn

    def tick(self, bb):
        r = self.fn(bb)
        if not isinstance(r, Status):
            r = SUCCESS if r else FAILURE
        return r


class RetryUntil(BTNode):
    """Re-ticks ``child`` until it succeeds or ``done(bb)`` holds."""

    def __init__(self, child: BTNode, done: Callable[["Blackboard"], bool], limit: int = 1000,
                 name: str = "retry"):
        self.child = child
        self.done = done
        self.limit = limit
        self.name = name

    def tick(self, bb):
        for _ in range(self.limit):
            if self.child.tick(bb) is SUCCESS:
                return SUCCESS
            if self.done(bb):
                return FAILURE
        return FAILURE


# Public alias; ``Sequence`` would shadow typing.Sequence inside this module.
Sequence = Sequence_


def tick(node: BTNode, bb: "Blackboard") -> Status:
    return node.tick(bb)


# ---------------------------------------------------------------- blackboard

@dataclass
class Blackboard:
    robot: Robot
    buckets: Buckets
    states: Dict[Sym, UnknownState]
    order: List[Sym]
    sum_registry: Dict[str, SumOfAngleRecord] = field(default_factory=dict)
    assigned: Optional[Sym] = None
    last: Optional[Sym] = None
    tried: int = 0
    candidates: List[CandidateSolution] = field(default_factory=list)
    loop_count: int = 0
    solve_order: List[Sym] = field(default_factory=list)
    retired: List[Sym] = field(default_factory=list)
    changed: bool = False

    @property
    def unsolved(self) -> List[Sym]:
        return [s for s in self.order if not self.states[s].solved]

    @property
    def unsolved_joints(self) -> List[Sym]:
        return [s for s in self.unsolved if s.is_joint]

    def context(self) -> SolveContext:
        return SolveContext(self.buckets, frozenset(self.unsolved), self.sum_registry)

    def reclassify(self) -> None:
        self.buckets = classify(self.buckets.all(), self.unsolved)

    def insert_sum(self, rec: SumOfAngleRecord) -> None:
        names = {c.name for c, _ in rec.constituents}
        last = max(i for i, s in enumerate(self.order) if s.name in names)
        self.order.insert(last + 1, rec.combined)
        self.states[rec.combined] = UnknownState(rec.combined)


def new_blackboard(robot: Robot) -> Blackboard:
    meqs = build_matrix_equations(robot, forward_kinematics(robot)[0])
    buckets = extract_and_classify(meqs, robot.unknowns)
    states = {u: UnknownState(u) for u in robot.unknowns}
    return Blackboard(robot, buckets, states, list(robot.unknowns))


# ---------------------------------------------------------------- actions

def sum_of_angle_action(bb: Blackboard) -> bool:
    eqs, new = apply_sum_of_angle(bb.buckets.all(), bb.unsolved, bb.sum_registry)
    for rec in new:
        bb.insert_sum(rec)
        eqs.append(rec.equation())
    before = bb.buckets.snapshot()
    bb.buckets = classify(eqs, bb.unsolved)
    changed = bb.buckets.snapshot() != before
    bb.changed |= changed
    return changed


def substitution_action(bb: Blackboard) -> bool:
    eqs, _ = apply_substitution(bb.buckets.all(), bb.unsolved)
    before = bb.buckets.snapshot()
    bb.buckets = classify(eqs, bb.unsolved)
    changed = bb.buckets.snapshot() != before
    bb.changed |= changed
    return changed


def _relation_ready(bb: Blackboard) -> Optional[Sym]:
    """A joint left as the only unsolved constituent of a solved sum."""
    for rec in bb.sum_registry.values():
        st = bb.states.get(rec.combined)
        if st is None or not st.solved:
            continue
        rest = [c for c, _ in rec.constituents if not bb.states[c].solved]
        if len(rest) == 1:
            return rest[0]
    return None


def assign_next_unknown(bb: Blackboard) -> Status:
    """Assign the next unsolved unknown in chain order, continuing after the
    previously assigned one and wrapping around; fails once every unsolved
    unknown has been tried in this tick.  A constituent that became
    recoverable from a solved sum-of-angle relation goes first."""
    todo = bb.unsolved
    if bb.tried >= len(todo):
        bb.assigned = None
        return FAILURE
    pick = _relation_ready(bb) if bb.tried == 0 else None
    if pick is None:
        start = bb.order.index(bb.last) + 1 if bb.last in bb.order else 0
        n = len(bb.order)
        for k in range(n):
            s = bb.order[(start + k) % n]
            if not bb.states[s].solved:
                pick = s
                break
    bb.tried += 1
    bb.last = bb.assigned = pick
    bb.candidates = []
    return SUCCESS


def solver_action(name: str) -> Action:
    fn = SOLVERS[name]

    def run(bb: Blackboard) -> bool:
        if bb.assigned is None:
            return False
        found = fn(bb.assigned, bb.context())
        bb.candidates.extend(found)
        return bool(found)

    return Action(name, run)


def rank_and_commit(bb: Blackboard) -> bool:
    if not bb.candidates:
        return False
    best = rank_candidates(bb.candidates)
    st = bb.states[bb.assigned]
    st.order = len(bb.solve_order)
    st.instances = expand_candidate(best, bb.states)
    st.chosen = best
    st.solved = True
    bb.solve_order.append(bb.assigned)
    log.info("solved %s by %s (%d branches)", bb.assigned.name, best.solver_name, len(st.instances))
    eqs, gone = retire_sums(bb.buckets.all(), bb.sum_registry, bb.unsolved)
    for s in gone:
        bb.order.remove(s)
        del bb.states[s]
        bb.retired.append(s)
    bb.buckets = classify(eqs, bb.unsolved)
    bb.candidates = []
    return True


def build_tree() -> BTNode:
    """Sequence[Succeeder(Parallel[sum-of-angle, substitution]),
    retry(Sequence[Assigner, Parallel[six solvers], Ranker])]."""
    transforms = Succeeder(Parallel([Action("sum_of_angle", sum_of_angle_action),
                                     Action("substitution", substitution_action)]))
    solve_one = Sequence_([
        Action("assigner", assign_next_unknown),
        Parallel([solver_action(n) for n in SOLVERS], name="solvers"),
        Action("ranker", rank_and_commit),
    ], name="solve_one")

    def reset(bb: Blackboard) -> bool:
        bb.tried = 0
        return True

    return Sequence_([transforms, Action("reset_scan", reset),
                      RetryUntil(solve_one, lambda bb: bb.assigned is None)], name="iteration")


# ---------------------------------------------------------------- loop

class OutcomeKind(enum.Enum):
    FULLY_SOLVED = "FullySolved"
    PARTIALLY_SOLVED = "PartiallySolved"
    ITERATION_LIMIT = "IterationLimit"


@dataclass
class SolveOutcome:
    kind: OutcomeKind
    unsolved: List[Sym]
    iterations: int

    @property
    def fully_solved(self) -> bool:
        return self.kind is OutcomeKind.FULLY_SOLVED


def run_solver_loop(bb: Blackboard, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> SolveOutcome:
    """One tree tick per outer iteration; each iteration commits at most one
    solution."""
    tree = build_tree()
    while bb.unsolved_joints:
        if bb.loop_count >= max_iterations:
            return SolveOutcome(OutcomeKind.ITERATION_LIMIT, bb.unsolved_joints, bb.loop_count)
        bb.loop_count += 1
        bb.changed = False
        status = tick(tree, bb)
        if status is FAILURE and not bb.changed:
            return SolveOutcome(OutcomeKind.PARTIALLY_SOLVED, bb.unsolved_joints, bb.loop_count)
    return SolveOutcome(OutcomeKind.FULLY_SOLVED, [], bb.loop_count)


def solve_robot(robot: Robot, max_iterations: int = DEFAULT_MAX_ITERATIONS):
    bb = new_blackboard(robot)
    return bb, run_solver_loop(bb, max_iterations)
