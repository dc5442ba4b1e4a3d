"""Solution dependency graph over branch nodes, redundant-edge pruning and
pose-set enumeration."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Sequence, Set, Tuple

from .exprcore import Expr, Kind, Sym, free_symbols
from .solvers import UnknownState


class UnsolvedVariable(ValueError):
    pass


class CyclicDependency(ValueError):
    pass


class EmptyPoseSet(ValueError):
    pass


def _base(s: Sym) -> Sym:
    return s.at_branch(0)


@dataclass(frozen=True)
class SolutionNode:
    variable: Sym
    branch_index: int
    expression: Expr
    direct_parents: Tuple[Sym, ...]

    @property
    def label(self) -> Sym:
        return self.variable.at_branch(self.branch_index)


@dataclass
class SolutionGraph:
    nodes: Dict[Sym, SolutionNode]
    variables: List[Sym]
    removed: List[Tuple[Sym, Sym]] = field(default_factory=list)

    def by_variable(self, v: Sym) -> List[SolutionNode]:
        return [n for n in self.nodes.values() if n.variable == v]

    def variable_parents(self) -> Dict[Sym, Set[Sym]]:
        out: Dict[Sym, Set[Sym]] = {v: set() for v in self.variables}
        for n in self.nodes.values():
            out[n.variable].update(_base(p) for p in n.direct_parents)
        return out

    def multi_parent_variables(self) -> Dict[Sym, List[Sym]]:
        """Variables whose nodes keep two or more independent parents."""
        out = {}
        for v, ps in self.variable_parents().items():
            if len(ps) >= 2:
                out[v] = sorted(ps, key=self.variables.index)
        return out

    @property
    def is_tree(self) -> bool:
        return not self.multi_parent_variables()


RawMap = Dict[Sym, Tuple[Expr, FrozenSet[Sym]]]


def collect_dependencies(states: Sequence[UnknownState]) -> RawMap:
    """For each branch node: its expression and the branch-labeled
    symbols it reads."""
    raw: RawMap = {}
    for st in states:
        if not st.solved or st.chosen is None:
            raise UnsolvedVariable(st.symbol.name)
        for inst in st.instances:
            parents = frozenset(s for s in free_symbols(inst.expr) if s.branch > 0)
            raw[inst.symbol] = (inst.expr, parents)
    return raw


def _topo(raw: RawMap) -> List[Sym]:
    indeg = {k: 0 for k in raw}
    kids: Dict[Sym, List[Sym]] = {k: [] for k in raw}
    for k, (_, ps) in raw.items():
        for p in ps:
            if p not in raw:
                raise UnsolvedVariable(p.label)
            indeg[k] += 1
            kids[p].append(k)
    q = deque(sorted((k for k, d in indeg.items() if d == 0), key=lambda s: (s.name, s.branch)))
    out = []
    while q:
        k = q.popleft()
        out.append(k)
        for c in kids[k]:
            indeg[c] -= 1
            if indeg[c] == 0:
                q.append(c)
    if len(out) != len(raw):
        raise CyclicDependency("dependency cycle among solution branches")
    return out


def prune_redundant_edges(raw: RawMap, variables: Sequence[Sym] = ()) -> SolutionGraph:
    """Drop an edge child -> A when another parent of the child already has
    A among its ancestors."""
    order = _topo(raw)
    ancestors: Dict[Sym, FrozenSet[Sym]] = {}
    for k in order:
        acc = set()
        for p in raw[k][1]:
            acc.add(p)
            acc |= ancestors[p]
        ancestors[k] = frozenset(acc)
    nodes = {}
    removed = []
    for k in order:
        expr, ps = raw[k]
        keep = []
        for a in sorted(ps, key=lambda s: (s.name, s.branch)):
            if any(a in ancestors[q] for q in ps if q != a):
                removed.append((k, a))
            else:
                keep.append(a)
        nodes[k] = SolutionNode(_base(k), k.branch, expr, tuple(keep))
    if not variables:
        seen = []
        for k in order:
            if _base(k) not in seen:
                seen.append(_base(k))
        variables = seen
    return SolutionGraph(nodes, list(variables), removed)


@dataclass(frozen=True)
class PoseSet:
    nodes: Tuple[SolutionNode, ...]

    def choice(self) -> Dict[Sym, int]:
        return {n.variable: n.branch_index for n in self.nodes}

    @property
    def joint_nodes(self) -> List[SolutionNode]:
        return [n for n in self.nodes if n.variable.kind != Kind.SUM_OF_ANGLE]

    def labels(self) -> List[str]:
        return [n.label.label for n in self.joint_nodes]


def enumerate_pose_sets(graph: SolutionGraph) -> List[PoseSet]:
    """Every assignment of one branch per variable in which each chosen
    node's parents are also chosen.  Variables are visited in
    ``graph.variables`` order, which must list parents before children."""
    per_var = {v: sorted(graph.by_variable(v), key=lambda n: n.branch_index) for v in graph.variables}
    out: List[PoseSet] = []
    chosen: Dict[Sym, int] = {}
    picked: List[SolutionNode] = []

    def ok(n: SolutionNode) -> bool:
        for p in n.direct_parents:
            b = chosen.get(_base(p))
            if b is None:
                raise CyclicDependency(f"{n.label.label} visited before parent {p.label}")
            if b != p.branch:
                return False
        return True

    def go(i: int) -> None:
        if i == len(graph.variables):
            out.append(PoseSet(tuple(picked)))
            return
        v = graph.variables[i]
        for n in per_var[v]:
            if ok(n):
                chosen[v] = n.branch_index
                picked.append(n)
                go(i + 1)
                picked.pop()
                del chosen[v]

    go(0)
    if not out:
        raise EmptyPoseSet("no consistent branch assignment")
    return out


def build_graph(states: Mapping[Sym, UnknownState], solve_order: Sequence[Sym]) -> SolutionGraph:
    raw = collect_dependencies([states[s] for s in solve_order])
    return prune_redundant_edges(raw, list(solve_order))
