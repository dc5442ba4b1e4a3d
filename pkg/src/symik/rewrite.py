"""Equation transforms applied between solving passes: sum-of-angle
renaming and substitution of one equation into another."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exprcore import (Add, Cos, Expr, Kind, Mul, Num, Sin, Sym, canonicalize,
                       free_symbols, replace_symbols, substitute)
from .exprcore.expr import _sorted_terms, from_poly, to_poly
from .kinmodel import Buckets, ScalarEquation, classify

MAX_SUBSTITUTION_PASSES = 10
RELATION = "relation"


@dataclass(frozen=True)
class SumOfAngleRecord:
    combined: Sym
    constituents: Tuple[Tuple[Sym, int], ...]

    @property
    def relation(self) -> Expr:
        """``combined - sum(sign*constituent)``, zero by definition."""
        return canonicalize(self.combined - self.expansion)

    @property
    def expansion(self) -> Expr:
        return canonicalize(Add([Mul((Num(s), c)) for c, s in self.constituents]))

    def equation(self) -> ScalarEquation:
        return ScalarEquation(self.combined, self.expansion, origin=RELATION)


def _sum_name(parts: Sequence[Tuple[Sym, int]]) -> str:
    base = parts[0][0].name.rsplit("_", 1)[0]
    tail = "".join(("" if s > 0 or i == 0 else "m") + c.name.rsplit("_", 1)[-1]
                   for i, (c, s) in enumerate(parts))
    return f"{base}_{tail}"


def _angle_combination(arg: Expr, unsolved: frozenset) -> Optional[Tuple[Tuple[Sym, int], ...]]:
    """``arg`` as +-1 combination of >= 2 unsolved revolute joints, first sign +."""
    items = _sorted_terms(to_poly(arg))
    if len(items) < 2:
        return None
    out = []
    for m, c in items:
        if len(m) != 1 or m[0][1] != 1 or abs(c) != 1:
            return None
        s = m[0][0]
        if not isinstance(s, Sym) or s.kind != Kind.REVOLUTE or s not in unsolved:
            return None
        out.append((s, int(c)))
    if out[0][1] < 0:
        return None
    return tuple(out)


def _compound_atoms(e: Expr, found: set) -> None:
    if isinstance(e, (Sin, Cos)):
        found.add(e)
    for c in e.children():
        _compound_atoms(c, found)


def apply_sum_of_angle(eqs: Sequence[ScalarEquation], unsolved: Sequence[Sym],
                       registry: Dict[str, SumOfAngleRecord]) -> Tuple[List[ScalarEquation], List[SumOfAngleRecord]]:
    """Rename compound angles to sum-of-angle symbols.

    Returns the rewritten equations and the records created by this call
    (``registry`` is updated in place)."""
    live = frozenset(unsolved)
    new: List[SumOfAngleRecord] = []
    out = []
    for eq in eqs:
        if eq.origin == RELATION:
            out.append(eq)
            continue
        atoms: set = set()
        _compound_atoms(eq.lhs, atoms)
        _compound_atoms(eq.rhs, atoms)
        reps = []
        for at in sorted(atoms, key=repr):
            parts = _angle_combination(at.arg, live)
            if parts is None:
                continue
            name = _sum_name(parts)
            rec = registry.get(name)
            if rec is None:
                sym = Sym(name, Kind.SUM_OF_ANGLE,
                          constituents=tuple((c.name, s) for c, s in parts))
                rec = SumOfAngleRecord(sym, parts)
                registry[name] = rec
                new.append(rec)
            reps.append((at, type(at)(rec.combined)))
        if reps:
            eq = ScalarEquation(substitute(eq.lhs, reps), substitute(eq.rhs, reps),
                                eq.unknowns, eq.origin)
        out.append(eq)
    return out, new


def retire_sums(eqs: Sequence[ScalarEquation], registry: Dict[str, SumOfAngleRecord],
                unsolved: Iterable[Sym]) -> Tuple[List[ScalarEquation], List[Sym]]:
    """Expand unsolved sum symbols whose constituents are all solved back
    into their constituents; such symbols no longer need a solver."""
    live = frozenset(unsolved)
    mapping = {}
    for rec in registry.values():
        if rec.combined in live and all(c not in live for c, _ in rec.constituents):
            mapping[rec.combined] = rec.expansion
    if not mapping:
        return list(eqs), []
    out = []
    for eq in eqs:
        if eq.origin == RELATION and eq.lhs in mapping:
            continue
        out.append(ScalarEquation(replace_symbols(eq.lhs, mapping),
                                  replace_symbols(eq.rhs, mapping), eq.unknowns, eq.origin))
    return out, sorted(mapping, key=lambda s: s.name)


# ---------------------------------------------------------------- substitution

def _split(eq: ScalarEquation, live: frozenset) -> Optional[Tuple[Expr, Expr]]:
    """``U + K = 0`` with U the unknown-bearing terms; returns (U, -K)."""
    p = to_poly(eq.residual)
    u, k = {}, {}
    for m, c in p.items():
        has = any(not live.isdisjoint(free_symbols(a)) for a, _ in m)
        (u if has else k)[m] = c
    if not u or not k:
        return None
    return from_poly(u), canonicalize(-from_poly(k))


def _count(eq: ScalarEquation, live: frozenset) -> int:
    return len((free_symbols(eq.lhs) | free_symbols(eq.rhs)) & live)


def apply_substitution(eqs: Sequence[ScalarEquation], unsolved: Sequence[Sym],
                       max_passes: int = MAX_SUBSTITUTION_PASSES) -> Tuple[List[ScalarEquation], int]:
    """Replace the unknown part of one equation by its known side wherever
    it occurs in another, keeping a rewrite only if it strictly lowers that
    equation's unknown count and leaves at least one unknown (a rewrite to
    a pure pose identity would discard the equation).  Returns the equations and the pass count."""
    live = frozenset(unsolved)
    eqs = list(eqs)
    passes = 0
    for passes in range(1, max_passes + 1):
        rules = []
        for j, e2 in enumerate(eqs):
            if e2.origin == RELATION:
                continue
            r = _split(e2, live)
            if r is not None:
                rules.append((j, r))
        changed = False
        for i, e1 in enumerate(eqs):
            if e1.origin == RELATION:
                continue
            n1 = _count(e1, live)
            if n1 == 0:
                continue
            for j, (pat, rep) in rules:
                if j == i:
                    continue
                lhs = substitute(e1.lhs, [(pat, rep)])
                rhs = substitute(e1.rhs, [(pat, rep)])
                cand = ScalarEquation(lhs, rhs, e1.unknowns, e1.origin + "+sub")
                n2 = _count(cand, live)
                if 0 < n2 < n1 and not cand.residual.is_zero:
                    eqs[i] = e1 = cand
                    n1 = n2
                    changed = True
        if not changed:
            break
    return eqs, passes


def rewrite_buckets(b: Buckets, unsolved: Sequence[Sym], registry: Dict[str, SumOfAngleRecord]) -> Buckets:
    eqs, new = apply_sum_of_angle(b.all(), unsolved, registry)
    live = list(unsolved) + [r.combined for r in new]
    eqs += [r.equation() for r in new]
    eqs, _ = apply_substitution(eqs, live)
    return classify(eqs, live)
