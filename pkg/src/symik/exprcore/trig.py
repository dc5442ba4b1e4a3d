"""Angle-sum contraction: c_a*c_b - s_a*s_b -> cos(a+b) and friends."""
from __future__ import annotations

from fractions import Fraction

from .expr import (Add, Cos, Expr, Mul, Num, Poly, Sin, sort_key, _poly_add_into, _poly_mul,
                   _sorted_terms, canonicalize, from_poly, to_poly)
from .match import _mono_quotient, _times

MAX_CONTRACTIONS = 200


def _atom(cls, a: Expr, b: Expr, sign: int) -> Poly:
    arg = Add((a, b)) if sign > 0 else Add((a, Mul((Num(-1), b))))
    return to_poly(canonicalize(cls(canonicalize(arg))))


def _try_pair(p: Poly, m, k, x, y):
    """Look for the partner of term ``k*m`` built on trig atoms x, y."""
    ax, ay = x.arg, y.arg
    if ax == ay:
        return None
    M = _mono_quotient(m, ((x, 1), (y, 1)))
    if M is None:
        return None
    if isinstance(x, Cos) and isinstance(y, Cos):
        partner = _times(M, _sorted_mono(Sin(ax), Sin(ay)))
        if partner is None or partner not in p:
            return None
        kp = p[partner]
        if kp == -k:
            return partner, M, _atom(Cos, ax, ay, +1)
        if kp == k:
            return partner, M, _atom(Cos, ax, ay, -1)
        return None
    if isinstance(x, Sin) and isinstance(y, Cos):
        partner = _times(M, _sorted_mono(Cos(ax), Sin(ay)))
        if partner is None or partner not in p:
            return None
        kp = p[partner]
        if kp == k:
            return partner, M, _atom(Sin, ax, ay, +1)
        if kp == -k:
            return partner, M, _atom(Sin, ax, ay, -1)
    return None


def _sorted_mono(u: Expr, v: Expr):
    return tuple(sorted(((u, 1), (v, 1)), key=lambda t: sort_key(t[0])))


def contract_angle_sums(e: Expr) -> Expr:
    """Fold products of sines and cosines of different angles into sines and
    cosines of their sums or differences wherever the matching partner term
    is present with a compatible coefficient."""
    e = canonicalize(e)
    p = dict(to_poly(e))
    if len(p) < 2:
        return e
    for _ in range(MAX_CONTRACTIONS):
        hit = None
        for m, k in _sorted_terms(p):
            trig = [a for a, ex in m if isinstance(a, (Sin, Cos)) and ex >= 1]
            for x in trig:
                for y in trig:
                    if x is y or not isinstance(y, Cos):
                        continue
                    if isinstance(x, Cos) and sort_key(x) > sort_key(y):
                        continue
                    r = _try_pair(p, m, k, x, y)
                    if r is not None:
                        hit = (m, k) + r
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            break
        m, k, partner, M, new = hit
        del p[m]
        del p[partner]
        _poly_add_into(p, _poly_mul({M: Fraction(1)}, new), k)
    return from_poly(p)
