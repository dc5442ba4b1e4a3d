"""The six rule-based solver leaves, candidate ranking and per-parent
branch expansion."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .exprcore import (PI, Atan2, Asin, Acos, Expr, Kind, Mul, Num, Pow,
                       Sqrt, Sym, canonicalize, contract_angle_sums,
                       free_symbols, match_linear, match_trig_linear,
                       replace_symbols)
from .exprcore.expr import to_poly
from .exprcore.match import find_multiple
from .kinmodel import Buckets, ScalarEquation
from .rewrite import RELATION, SumOfAngleRecord

# Constituent of a solved sum-of-angle symbol recovered from its defining
# relation: an identity, so it outranks every pattern solver.
RANK_RELATION = 110
RANK_ATAN2_ONE = 100
RANK_ALGEBRA = 90
RANK_ATAN2_TWO = 80
RANK_ASIN_ACOS = 60

POSITION = frozenset(("Px", "Py", "Pz"))


class EmptyCandidateList(ValueError):
    pass


@dataclass(frozen=True)
class CandidateSolution:
    variable: Sym
    branches: Tuple[Expr, ...]
    solver_name: str
    source_equations: Tuple[ScalarEquation, ...]
    dependencies: FrozenSet[Sym]
    rank_score: int

    @property
    def size(self) -> int:
        return sum(complexity(b) for b in self.branches)


# Extra weight for dividing by a symbolic expression: the quotient is
# undefined wherever the divisor vanishes, which may not be a true singularity.
DIVISION_WEIGHT = 50


def complexity(e: Expr) -> int:
    """Node count that treats a sign flip as free, so ``atan2(-y, -x)``
    weighs the same as ``atan2(y, x)``, and charges ``DIVISION_WEIGHT`` per
    reciprocal of a non-constant expression."""
    if isinstance(e, Pow) and e.exp < 0 and free_symbols(e.base):
        return DIVISION_WEIGHT + complexity(e.base)
    if isinstance(e, Mul):
        rest = [a for a in e.args if not (isinstance(a, Num) and a.value == -1)]
        if len(rest) == 1:
            return complexity(rest[0])
        return 1 + sum(complexity(a) for a in rest)
    return 1 + sum(complexity(c) for c in e.children())


@dataclass
class SolveContext:
    """Read-only view the solver leaves work from."""

    buckets: Buckets
    unsolved: FrozenSet[Sym]
    registry: Mapping[str, SumOfAngleRecord] = field(default_factory=dict)

    def known(self, e: Expr) -> bool:
        return free_symbols(e).isdisjoint(self.unsolved)

    def single(self, x: Sym) -> List[ScalarEquation]:
        """Equations whose only unsolved unknown is ``x``."""
        return [e for e in self.buckets.one if e.unknowns == frozenset((x,))]

    def containing(self, x: Sym) -> List[ScalarEquation]:
        return [e for e in self.buckets.all() if x in e.unknowns and e.origin != RELATION]


def _div(a: Expr, b: Expr) -> Expr:
    return canonicalize(Mul((a, Pow(b, -1))))


def _degenerate(e: Expr) -> bool:
    """True if ``e`` contains an atan2 whose arguments are both identically 0."""
    if isinstance(e, Atan2) and e.args[0].is_zero and e.args[1].is_zero:
        return True
    return any(_degenerate(c) for c in e.children())


def _candidate(x: Sym, branches, name: str, eqs, rank: int, ctx: SolveContext) -> Optional[CandidateSolution]:
    branches = tuple(canonicalize(b) for b in branches)
    deps = frozenset()
    for b in branches:
        if _degenerate(b):
            return None
        fs = free_symbols(b)
        if not fs.isdisjoint(ctx.unsolved) or x in fs:
            return None
        deps |= {s for s in fs if s.kind in (Kind.REVOLUTE, Kind.PRISMATIC, Kind.SUM_OF_ANGLE)}
    return CandidateSolution(x, branches, name, tuple(eqs), deps, rank)


# ---------------------------------------------------------------- the six leaves

def solve_algebra(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    """``a + b*x = 0`` with ``b`` not identically zero."""
    out = []
    for eq in ctx.single(x):
        m = match_linear(eq.residual, x)
        if m is None:
            continue
        a, b = m
        if b.is_zero:
            continue
        rank = RANK_RELATION if eq.origin == RELATION else RANK_ALGEBRA
        c = _candidate(x, [_div(-a, b)], "algebra", [eq], rank, ctx)
        if c:
            out.append(c)
    return out


def solve_sin_or_cos(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    if x.kind not in (Kind.REVOLUTE, Kind.SUM_OF_ANGLE):
        return []
    out = []
    for eq in ctx.single(x):
        m = match_trig_linear(eq.residual, x)
        if m is None:
            continue
        a, b, c = m
        if not a.is_zero and b.is_zero:
            v = _div(-c, a)
            branches = [Asin(v), PI - Asin(v)]
        elif a.is_zero and not b.is_zero:
            v = _div(-c, b)
            branches = [Acos(v), -Acos(v)]
        else:
            continue
        cand = _candidate(x, branches, "sine_or_cosine", [eq], RANK_ASIN_ACOS, ctx)
        if cand:
            out.append(cand)
    return out


def _ratio(k1: Expr, k2: Expr) -> Expr:
    """``k1/k2``, cancelling a common polynomial factor when one is a
    monomial multiple of the other."""
    p1, p2 = to_poly(k1), to_poly(k2)
    if len(p1) == len(p2) and len(p1) > 1:
        hit = find_multiple(p1, p2)
        if hit is not None:
            r, k = hit
            from .exprcore.expr import _poly_mul, from_poly
            scaled = _poly_mul({r: k}, p2)
            if scaled == p1:
                return from_poly({r: k})
    return _div(k1, k2)


def solve_tangent(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    """``K1*sin(x) = A`` and ``K2*cos(x) = B``."""
    if x.kind not in (Kind.REVOLUTE, Kind.SUM_OF_ANGLE):
        return []
    sins, coss = [], []
    for eq in ctx.containing(x):
        m = match_trig_linear(eq.residual, x)
        if m is None:
            continue
        a, b, c = m
        if not ctx.known(c):
            continue
        if not a.is_zero and b.is_zero:
            sins.append((eq, a, canonicalize(-c)))
        elif a.is_zero and not b.is_zero:
            coss.append((eq, b, canonicalize(-c)))
    out = []
    for (e1, k1, A), (e2, k2, B) in itertools.product(sins, coss):
        if A.is_zero and B.is_zero:
            continue
        if ctx.known(k1) and ctx.known(k2):
            cand = _candidate(x, [Atan2(_div(A, k1), _div(B, k2))], "tangent",
                              [e1, e2], RANK_ATAN2_ONE, ctx)
        else:
            C = _ratio(k1, k2)
            if not ctx.known(C):
                continue
            y = _div(A, C)
            cand = _candidate(x, [Atan2(y, B), Atan2(-y, -B)], "tangent",
                              [e1, e2], RANK_ATAN2_TWO, ctx)
        if cand:
            out.append(cand)
    return out


def sin_and_cos_branches(a: Expr, b: Expr, c: Expr) -> List[Expr]:
    """Roots of ``a*sin(x) + b*cos(x) + c = 0``."""
    if c.is_zero:
        base = Atan2(-b, a)
        return [base, base + PI]
    r = Sqrt(a * a + b * b - c * c)
    base = Atan2(a, b)
    return [base + Atan2(r, -c), base + Atan2(-r, -c)]


def solve_sin_and_cos(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    if x.kind not in (Kind.REVOLUTE, Kind.SUM_OF_ANGLE):
        return []
    out = []
    for eq in ctx.single(x):
        m = match_trig_linear(eq.residual, x)
        if m is None:
            continue
        a, b, c = m
        if a.is_zero or b.is_zero:
            continue
        cand = _candidate(x, sin_and_cos_branches(a, b, c), "sin_and_cos", [eq],
                          RANK_ATAN2_TWO, ctx)
        if cand:
            out.append(cand)
    return out


def solve_simultaneous(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    """``a*sin(x) + b*cos(x) = c`` together with ``k*(a*cos(x) - b*sin(x)) = d``.

    Both a and b must be nonzero; with one of them zero the pair is the
    tangent pattern and is left to :func:`solve_tangent`."""
    if x.kind not in (Kind.REVOLUTE, Kind.SUM_OF_ANGLE):
        return []
    forms = []
    for eq in ctx.single(x):
        m = match_trig_linear(eq.residual, x)
        if m is None or m[0].is_zero or m[1].is_zero:
            continue
        forms.append((eq,) + m)
    out = []
    for (e1, a, b, c1), (e2, a2, b2, c2) in itertools.permutations(forms, 2):
        # a2 = -k*b, b2 = k*a
        k = _div(b2, a)
        if not isinstance(k, Num) or k.is_zero:
            continue
        if not canonicalize(a2 + k * b).is_zero or not canonicalize(b2 - k * a).is_zero:
            continue
        c = canonicalize(-c1)
        d = canonicalize(-c2 * Num(1 / k.value))
        cand = _candidate(x, [Atan2(a * c - b * d, a * d + b * c)], "simultaneous",
                          [e1, e2], RANK_ATAN2_ONE, ctx)
        if cand:
            out.append(cand)
    return out


def _expand_sums(e: Expr, x: Sym, ctx: SolveContext) -> Expr:
    mapping = {r.combined: r.expansion for r in ctx.registry.values()
               if r.combined in ctx.unsolved and r.combined != x}
    return replace_symbols(e, mapping)


def solve_x2y2(x: Sym, ctx: SolveContext) -> List[CandidateSolution]:
    """Square and add two position equations so that everything except ``x``
    cancels, then solve the resulting ``a*sin(x) + b*cos(x) + c = 0``."""
    if x.kind not in (Kind.REVOLUTE, Kind.SUM_OF_ANGLE):
        return []
    eqs = [e for e in ctx.buckets.two + ctx.buckets.more
           if e.origin != RELATION and ctx.known(e.lhs) and
           any(s.name in POSITION for s in free_symbols(e.lhs))]
    expanded = []
    for e in eqs:
        lhs, rhs = _expand_sums(e.lhs, x, ctx), _expand_sums(e.rhs, x, ctx)
        expanded.append((e, lhs, rhs))
    out = []
    seen = set()
    for (e1, l1, r1), (e2, l2, r2) in itertools.combinations(expanded, 2):
        if x not in free_symbols(r1) | free_symbols(l1) or x not in free_symbols(r2) | free_symbols(l2):
            continue
        s = canonicalize(r1 * r1 + r2 * r2 - l1 * l1 - l2 * l2)
        s = canonicalize(contract_angle_sums(s))
        if free_symbols(s) & ctx.unsolved != {x}:
            continue
        m = match_trig_linear(s, x)
        if m is None or (m[0].is_zero and m[1].is_zero):
            continue
        if s in seen:
            continue
        seen.add(s)
        cand = _candidate(x, sin_and_cos_branches(*m), "x2y2", [e1, e2], RANK_ATAN2_TWO, ctx)
        if cand:
            out.append(cand)
    return out


SOLVERS: Dict[str, Callable[[Sym, SolveContext], List[CandidateSolution]]] = {
    "algebra": solve_algebra,
    "sine_or_cosine": solve_sin_or_cos,
    "tangent": solve_tangent,
    "sin_and_cos": solve_sin_and_cos,
    "simultaneous": solve_simultaneous,
    "x2y2": solve_x2y2,
}


def rank_key(c: CandidateSolution):
    return (-c.rank_score, len(c.branches), len(c.dependencies), c.size, c.solver_name)


def rank_candidates(cands: Sequence[CandidateSolution]) -> CandidateSolution:
    if not cands:
        raise EmptyCandidateList("no candidates to rank")
    return min(cands, key=rank_key)


# ---------------------------------------------------------------- per-parent expansion

@dataclass(frozen=True)
class BranchInstance:
    """One solution node: a labeled variable and its expression over labeled
    parents.  ``context`` pins a branch for every ancestor and itself."""

    symbol: Sym
    expr: Expr
    parents: Tuple[Sym, ...]
    context: Tuple[Tuple[str, int], ...]

    @property
    def context_map(self) -> Dict[str, int]:
        return dict(self.context)


@dataclass
class UnknownState:
    symbol: Sym
    solved: bool = False
    chosen: Optional[CandidateSolution] = None
    instances: List[BranchInstance] = field(default_factory=list)
    order: int = -1

    @property
    def solution_branch_symbols(self) -> List[Sym]:
        return [i.symbol for i in self.instances]


def _merge(ctxs) -> Optional[Dict[str, int]]:
    out: Dict[str, int] = {}
    for c in ctxs:
        for k, v in c:
            if out.setdefault(k, v) != v:
                return None
    return out


def expand_candidate(cand: CandidateSolution, states: Mapping[Sym, UnknownState]) -> List[BranchInstance]:
    """Instantiate ``cand`` once per consistent combination of parent
    branches, parents taken in solve order."""
    parents = sorted(cand.dependencies, key=lambda s: (states[s].order, s.name))
    pools = [states[p].instances for p in parents]
    out = []
    k = 0
    for combo in itertools.product(*pools):
        ctx = _merge(i.context for i in combo)
        if ctx is None:
            continue
        mapping = {p: i.symbol for p, i in zip(parents, combo)}
        for b in cand.branches:
            k += 1
            sym = cand.variable.at_branch(k)
            c = dict(ctx)
            c[cand.variable.name] = k
            out.append(BranchInstance(sym, replace_symbols(b, mapping),
                                      tuple(i.symbol for i in combo), tuple(sorted(c.items()))))
    return out
