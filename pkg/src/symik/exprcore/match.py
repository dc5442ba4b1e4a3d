"""Structural queries on canonical expressions: free symbols, linear and
trig-linear decompositions, subtree substitution."""
from __future__ import annotations

from fractions import Fraction
from typing import AbstractSet, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .expr import (Add, Cos, Expr, Mono, Mul, Num, Poly, Pow, Sin, Sym, ZERO,
                   _mono_mul, _poly_add_into, _poly_mul, _sorted_terms,
                   canonicalize, from_poly, to_poly)


def free_symbols(e: Expr) -> FrozenSet[Sym]:
    try:
        return e._free
    except AttributeError:
        pass
    if isinstance(e, Sym):
        out = frozenset((e,))
    else:
        out = frozenset()
        for c in e.children():
            out |= free_symbols(c)
    e._free = out
    return out


def free_unknowns(e: Expr, unknowns: AbstractSet[Sym]) -> FrozenSet[Sym]:
    return free_symbols(e) & frozenset(unknowns)


def depends_on(e: Expr, syms: AbstractSet[Sym]) -> bool:
    return not free_symbols(e).isdisjoint(syms)


def terms(e: Expr) -> List[Tuple[Mono, Fraction]]:
    """Monomials of ``e`` in canonical order."""
    return _sorted_terms(to_poly(canonicalize(e)))


def poly_expr(items: Iterable[Tuple[Mono, Fraction]]) -> Expr:
    p: Poly = {}
    for m, c in items:
        _poly_add_into(p, {m: c})
    return from_poly(p)


def _mono_has(m: Mono, x: Sym) -> bool:
    return any(a == x or x in free_symbols(a) for a, _ in m)


def match_linear(e: Expr, x: Sym) -> Optional[Tuple[Expr, Expr]]:
    """Split ``e`` as ``a + b*x`` with ``a``, ``b`` free of ``x``."""
    a_terms, b_terms = [], []
    for m, c in terms(e):
        exps = dict(m)
        k = exps.pop(x, 0)
        rest = tuple((at, ex) for at, ex in m if at != x)
        if any(x in free_symbols(at) for at, _ in rest):
            return None
        if k == 0:
            a_terms.append((m, c))
        elif k == 1:
            b_terms.append((rest, c))
        else:
            return None
    if not b_terms:
        return None
    return poly_expr(a_terms), poly_expr(b_terms)


def match_trig_linear(e: Expr, x: Sym) -> Optional[Tuple[Expr, Expr, Expr]]:
    """Split ``e`` as ``a*sin(x) + b*cos(x) + c`` with a, b, c free of ``x``."""
    s_atom, c_atom = Sin(x), Cos(x)
    a_terms, b_terms, c_terms = [], [], []
    for m, c in terms(e):
        ks = kc = 0
        rest = []
        for at, ex in m:
            if at == s_atom:
                ks = ex
            elif at == c_atom:
                kc = ex
            elif at == x or x in free_symbols(at):
                return None
            else:
                rest.append((at, ex))
        rest = tuple(rest)
        if ks == 0 and kc == 0:
            c_terms.append((m, c))
        elif ks == 1 and kc == 0:
            a_terms.append((rest, c))
        elif kc == 1 and ks == 0:
            b_terms.append((rest, c))
        else:
            return None
    return poly_expr(a_terms), poly_expr(b_terms), poly_expr(c_terms)


# ---------------------------------------------------------------- substitution

MAX_REPLACEMENTS = 64


def _mono_quotient(m: Mono, d: Mono) -> Optional[Mono]:
    """``m / d`` when every atom of ``d`` divides ``m`` with same-sign powers."""
    exps = dict(m)
    for a, e in d:
        have = exps.get(a, 0)
        if have == 0 or (have > 0) != (e > 0) or abs(have) < abs(e):
            return None
        exps[a] = have - e
    return tuple((a, e) for a, e in m if exps[a] != 0)


def _times(m: Mono, r: Mono) -> Optional[Mono]:
    p = _mono_mul(m, r)
    if len(p) != 1:
        return None
    (mm, c), = p.items()
    return mm if c == 1 else None


def find_multiple(p: Poly, pattern: Poly) -> Optional[Tuple[Mono, Fraction]]:
    """Find monomial ``r`` and rational ``k`` with ``k*r*pattern`` contained
    term-by-term in ``p``."""
    pat = _sorted_terms(pattern)
    if not pat:
        return None
    m0, c0 = pat[0]
    for m, c in _sorted_terms(p):
        r = _mono_quotient(m, m0)
        if r is None:
            continue
        k = c / c0
        ok = True
        for mi, ci in pat[1:]:
            t = _times(mi, r)
            if t is None or p.get(t) != k * ci:
                ok = False
                break
        if ok:
            return r, k
    return None


def _replace_poly(p: Poly, pattern: Poly, rep: Poly) -> Poly:
    if not pattern or list(pattern) == [()]:
        return p
    out = dict(p)
    for _ in range(MAX_REPLACEMENTS):
        hit = find_multiple(out, pattern)
        if hit is None:
            break
        r, k = hit
        rp = {r: Fraction(1)}
        _poly_add_into(out, _poly_mul(rp, pattern), -k)
        _poly_add_into(out, _poly_mul(rp, rep), k)
    return out


def _subst_one(e: Expr, pat: Expr, rep: Expr, pat_poly: Poly, rep_poly: Poly) -> Expr:
    if e == pat:
        return rep
    p = _replace_poly(to_poly(e), pat_poly, rep_poly)
    parts = []
    for m, c in _sorted_terms(p):
        factors: list = [Num(c)]
        for a, ex in m:
            a2 = _subst_atom(a, pat, rep, pat_poly, rep_poly)
            factors.append(a2 if ex == 1 else Pow(a2, ex))
        parts.append(Mul(factors))
    return canonicalize(Add(parts)) if parts else ZERO


def _subst_atom(a: Expr, pat, rep, pat_poly, rep_poly) -> Expr:
    if a == pat:
        return rep
    ch = a.children()
    if not ch:
        return a
    new = [_subst_one(c, pat, rep, pat_poly, rep_poly) for c in ch]
    if all(n is c for n, c in zip(new, ch)):
        return a
    return canonicalize(a.rebuild(new))


def substitute(e: Expr, replacements: Sequence[Tuple[Expr, Expr]]) -> Expr:
    """Replace every occurrence of each pattern, in list order.

    Sums and products match as sub-multisets up to a common monomial factor,
    e.g. pattern ``a*cos(y)`` matches inside ``2*a*b*cos(y)``."""
    e = canonicalize(e)
    for pat, rep in replacements:
        pat, rep = canonicalize(pat), canonicalize(rep)
        e = _subst_one(e, pat, rep, to_poly(pat), to_poly(rep))
    return e


def replace_symbols(e: Expr, mapping) -> Expr:
    """Fast symbol-for-expression substitution (no pattern search)."""
    if not mapping:
        return e
    mapping = {k: canonicalize(v) for k, v in mapping.items()}
    memo: dict = {}

    def go(x: Expr) -> Expr:
        if isinstance(x, Sym):
            return mapping.get(x, x)
        if id(x) in memo:
            return memo[id(x)]
        ch = x.children()
        if not ch or free_symbols(x).isdisjoint(mapping):
            r = x
        else:
            r = x.rebuild([go(c) for c in ch])
        memo[id(x)] = r
        return r

    return canonicalize(go(canonicalize(e)))


def size(e: Expr) -> int:
    """Node count, used for tie-breaking."""
    return 1 + sum(size(c) for c in e.children())
