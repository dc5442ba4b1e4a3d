"""End-to-end solve of one robot: equations, behavior tree, graph, pose sets
and the compiled solution program."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional

from .bt import DEFAULT_MAX_ITERATIONS, Blackboard, SolveOutcome, solve_robot
from .exprcore import Kind, Sym
from .kinmodel import Robot
from .program import Program, compile_program
from .solgraph import PoseSet, SolutionGraph, build_graph, enumerate_pose_sets
from .solvers import UnknownState

# Annotation text used in reports, keyed by solver name.
SOLVER_TITLES = {
    "algebra": "algebra",
    "sine_or_cosine": "sine or cosine",
    "tangent": "tangent",
    "sin_and_cos": "sinANDcos",
    "simultaneous": "simultaneous equation",
    "x2y2": "x2y2",
}


@dataclass
class SolvedRobot:
    robot: Robot
    blackboard: Blackboard
    outcome: SolveOutcome
    graph: Optional[SolutionGraph]
    poses: List[PoseSet]
    program: Optional[Program]
    seconds: float

    @property
    def solve_order(self) -> List[Sym]:
        return list(self.blackboard.solve_order)

    def state(self, v: Sym) -> UnknownState:
        return self.blackboard.states[v]

    def solver_of(self) -> Dict[str, str]:
        return {v.name: self.state(v).chosen.solver_name for v in self.solve_order}

    def not_tree_notes(self) -> List[str]:
        if self.graph is None:
            return []
        out = []
        for v, ps in self.graph.multi_parent_variables().items():
            if v.kind == Kind.SUM_OF_ANGLE:
                continue
            out.append(f"{pretty_name(v.name)} has {len(ps)} independent parents "
                       f"({', '.join(pretty_name(p.name) for p in ps)})")
        return out


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def pretty_name(name: str) -> str:
    """``th_5`` -> ``θ₅``; other names keep their stem."""
    stem, _, idx = name.partition("_")
    if stem == "th":
        stem = "θ"
    return stem + idx.translate(_SUB) if idx.isdigit() else name


def solve(robot: Robot, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> SolvedRobot:
    t0 = time.perf_counter()
    bb, outcome = solve_robot(robot, max_iterations)
    graph, poses, prog = None, [], None
    if outcome.fully_solved:
        graph = build_graph(bb.states, bb.solve_order)
        poses = enumerate_pose_sets(graph)
        prog = compile_program(robot, graph, poses)
    return SolvedRobot(robot, bb, outcome, graph, poses, prog, time.perf_counter() - t0)
