"""Expression tree nodes and canonicalization.

Every tree can be brought into a canonical form where sums and products are
flat, numeric factors are folded into one exact leading coefficient, operands
follow a fixed total order and products are fully expanded over sums.  The
canonical form is computed through a polynomial view: a dict mapping a
*monomial* (sorted tuple of ``(atom, exponent)`` pairs) to a rational
coefficient.  Atoms are symbols, pi, function applications and, for negative
powers only, whole sums.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict, Iterable, Tuple

__all__ = [
    "Kind", "Expr", "Num", "PiConst", "Sym", "Add", "Mul", "Pow",
    "Sin", "Cos", "Tan", "Asin", "Acos", "Atan2", "Sqrt",
    "canonicalize", "as_expr", "ZERO", "ONE", "PI", "sort_key", "to_poly",
    "from_poly", "Poly", "Mono",
]


class Kind(enum.IntEnum):
    """Role of a named symbol."""

    POSE = 0
    CONSTANT = 1
    REVOLUTE = 2
    PRISMATIC = 3
    SUM_OF_ANGLE = 4


class Expr:
    """Immutable expression node.  Structural equality, cached hash."""

    __slots__ = ("_hash", "_key", "_canon", "_poly", "_free")
    tag = -1

    def _fields(self) -> tuple:
        raise NotImplementedError

    def children(self) -> Tuple["Expr", ...]:
        return ()

    def rebuild(self, children) -> "Expr":
        return self

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        if hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._fields()))
            self._hash = h
            return h

    def __repr__(self):
        from ..exprparse import print_expr
        return f"<{type(self).__name__} {print_expr(canonicalize(self))}>"

    # arithmetic always yields canonical trees
    def __add__(self, other):
        return canonicalize(Add((self, as_expr(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return canonicalize(Add((self, Mul((Num(-1), as_expr(other))))))

    def __rsub__(self, other):
        return canonicalize(Add((as_expr(other), Mul((Num(-1), self)))))

    def __mul__(self, other):
        return canonicalize(Mul((self, as_expr(other))))

    __rmul__ = __mul__

    def __neg__(self):
        return canonicalize(Mul((Num(-1), self)))

    def __truediv__(self, other):
        return canonicalize(Mul((self, Pow(as_expr(other), -1))))

    def __rtruediv__(self, other):
        return canonicalize(Mul((as_expr(other), Pow(self, -1))))

    def __pow__(self, n: int):
        return canonicalize(Pow(self, int(n)))

    @property
    def is_zero(self) -> bool:
        return isinstance(self, Num) and self.value == 0


class Num(Expr):
    __slots__ = ("value",)
    tag = 0

    def __init__(self, value):
        self.value = Fraction(value)

    def _fields(self):
        return (self.value,)

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1


class PiConst(Expr):
    __slots__ = ()
    tag = 1

    def _fields(self):
        return ()


class Sym(Expr):
    """Named symbol.  ``branch`` > 0 labels one solution branch of a joint
    variable (printed ``th_1s2``); ``constituents`` lists the joint names a
    sum-of-angle symbol stands for, with signs as ``('th_2', 1)`` pairs."""

    __slots__ = ("name", "kind", "branch", "constituents")
    tag = 2

    def __init__(self, name: str, kind: Kind = Kind.CONSTANT, branch: int = 0,
                 constituents: Tuple[Tuple[str, int], ...] = ()):
        self.name = name
        self.kind = Kind(kind)
        self.branch = branch
        self.constituents = tuple(constituents)

    def _fields(self):
        return (self.name, self.kind, self.branch)

    @property
    def label(self) -> str:
        return f"{self.name}s{self.branch}" if self.branch else self.name

    def at_branch(self, branch: int) -> "Sym":
        return Sym(self.name, self.kind, branch, self.constituents)

    @property
    def is_joint(self) -> bool:
        return self.kind in (Kind.REVOLUTE, Kind.PRISMATIC)


class _NAry(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Expr]):
        self.args = tuple(args)

    def _fields(self):
        return self.args

    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(children)


class Add(_NAry):
    __slots__ = ()
    tag = 5


class Mul(_NAry):
    __slots__ = ()
    tag = 4


class Pow(Expr):
    __slots__ = ("base", "exp")
    tag = 3

    def __init__(self, base: Expr, exp: int):
        self.base = base
        self.exp = int(exp)

    def _fields(self):
        return (self.base, self.exp)

    def children(self):
        return (self.base,)

    def rebuild(self, children):
        return Pow(children[0], self.exp)


class _Func(Expr):
    __slots__ = ("args",)
    fname = ""

    def __init__(self, *args: Expr):
        self.args = tuple(args)

    def _fields(self):
        return self.args

    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(*children)

    @property
    def arg(self) -> Expr:
        return self.args[0]


class Sin(_Func):
    __slots__ = ()
    tag = 6
    fname = "sin"


class Cos(_Func):
    __slots__ = ()
    tag = 7
    fname = "cos"


class Tan(_Func):
    __slots__ = ()
    tag = 8
    fname = "tan"


class Asin(_Func):
    __slots__ = ()
    tag = 9
    fname = "asin"


class Acos(_Func):
    __slots__ = ()
    tag = 10
    fname = "acos"


class Atan2(_Func):
    """atan2(y, x)."""

    __slots__ = ()
    tag = 11
    fname = "atan2"


class Sqrt(_Func):
    __slots__ = ()
    tag = 12
    fname = "sqrt"


FUNCS = {c.fname: c for c in (Sin, Cos, Tan, Asin, Acos, Atan2, Sqrt)}

ZERO = Num(0)
ONE = Num(1)
PI = PiConst()


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Num(x)
    if isinstance(x, float):
        return Num(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


# ---------------------------------------------------------------- ordering

def sort_key(e: Expr) -> tuple:
    """Total order: numbers, pi, symbols by (kind, name), then composites by
    (variant tag, children)."""
    try:
        return e._key
    except AttributeError:
        pass
    if isinstance(e, Num):
        k = (0, e.value)
    elif isinstance(e, PiConst):
        k = (1,)
    elif isinstance(e, Sym):
        k = (2, int(e.kind), e.name, e.branch)
    elif isinstance(e, Pow):
        k = (3, sort_key(e.base), e.exp)
    else:
        k = (e.tag, tuple(sort_key(c) for c in e.children()))
    e._key = k
    return k


# ---------------------------------------------------------------- polynomials

Mono = Tuple[Tuple[Expr, int], ...]
Poly = Dict[Mono, Fraction]

PI_MONO: Mono = ((PI, 1),)


def _mono_key(m: Mono):
    return tuple((sort_key(a), e) for a, e in m)


def _mono_mul(m1: Mono, m2: Mono) -> Poly:
    if not m1:
        return {m2: Fraction(1)}
    if not m2:
        return {m1: Fraction(1)}
    exps: Dict[Expr, int] = dict(m1)
    for a, e in m2:
        exps[a] = exps.get(a, 0) + e
    return _normalize_mono(exps)


def _normalize_mono(exps: Dict[Expr, int]) -> Poly:
    extra = None
    for a in [a for a, e in exps.items() if isinstance(a, Sqrt) and abs(e) >= 2]:
        e = exps[a]
        q, r = divmod(e, 2)
        exps[a] = r
        p = _poly_pow(to_poly(a.arg), q)
        extra = p if extra is None else _poly_mul(extra, p)
    items = [(a, e) for a, e in exps.items() if e != 0]
    items.sort(key=lambda t: sort_key(t[0]))
    mono = tuple(items)
    if extra is None:
        return {mono: Fraction(1)}
    return _poly_mul(extra, {mono: Fraction(1)})


def _poly_add_into(acc: Poly, p: Poly, scale: Fraction = Fraction(1)) -> None:
    for m, c in p.items():
        v = acc.get(m, 0) + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def _poly_mul(p1: Poly, p2: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            _poly_add_into(out, _mono_mul(m1, m2), c1 * c2)
    return out


def _poly_pow(p: Poly, n: int) -> Poly:
    if n == 0:
        return {(): Fraction(1)}
    if n > 0:
        out = p
        for _ in range(n - 1):
            out = _poly_mul(out, p)
        return out
    if not p:
        # 1/0 stays symbolic; evaluation reports the division
        return {((ZERO, n),): Fraction(1)}
    if len(p) == 1:
        (m, c), = p.items()
        exps = {a: e * n for a, e in m}
        return {mm: cc * c ** n for mm, cc in _normalize_mono(exps).items()}
    lead = _leading_coeff(p)
    prim = {m: c / lead for m, c in p.items()}
    atom = from_poly(prim)
    return {((atom, n),): lead ** n}


def _sorted_terms(p: Poly):
    return sorted(p.items(), key=lambda t: (_mono_key(t[0]), t[1]))


def _leading_coeff(p: Poly) -> Fraction:
    """Coefficient of the first non-constant term (or the constant)."""
    terms = _sorted_terms(p)
    for m, c in terms:
        if m:
            return c
    return terms[0][1]


def _is_negative_leading(p: Poly) -> bool:
    return bool(p) and _leading_coeff(p) < 0


def to_poly(e: Expr) -> Poly:
    """Polynomial view of ``e`` over canonical atoms (returned dict must not be
    mutated by callers)."""
    try:
        return e._poly
    except AttributeError:
        pass
    p = _to_poly(e)
    e._poly = p
    return p


def _to_poly(e: Expr) -> Poly:
    if isinstance(e, Num):
        return {(): e.value} if e.value else {}
    if isinstance(e, (PiConst, Sym)):
        return {((e, 1),): Fraction(1)}
    if isinstance(e, Add):
        out: Poly = {}
        for a in e.args:
            _poly_add_into(out, to_poly(a))
        return _pythagorean(out)
    if isinstance(e, Mul):
        out = {(): Fraction(1)}
        for a in e.args:
            out = _poly_mul(out, to_poly(a))
            if not out:
                break
        return _pythagorean(out)
    if isinstance(e, Pow):
        return _pythagorean(_poly_pow(to_poly(e.base), e.exp))
    if isinstance(e, _Func):
        args = [canonicalize(a) for a in e.args]
        r = _simplify_func(type(e), args)
        if isinstance(r, _Func):
            r._canon = True
            return {((r, 1),): Fraction(1)}
        return to_poly(r)
    raise TypeError(f"unknown node {e!r}")


PYTHAGOREAN_PASSES = 20


def _pythagorean(p: Poly) -> Poly:
    """Fold k*M*sin(A)^2 + k*M*cos(A)^2 into k*M, to fixpoint (capped)."""
    if len(p) < 2:
        return p
    has_sq = any(isinstance(a, Sin) and e >= 2 for m in p for a, e in m)
    if not has_sq:
        return p
    p = dict(p)
    for _ in range(PYTHAGOREAN_PASSES):
        changed = False
        for m in [m for m, _ in _sorted_terms(p)]:
            if m not in p:
                continue
            for a, e in m:
                if not isinstance(a, Sin) or e < 2:
                    continue
                c = Cos(a.arg)
                c._canon = True
                rest = {x: y for x, y in m}
                rest[a] -= 2
                partner = dict(rest)
                partner[c] = partner.get(c, 0) + 2
                pm = _single(_normalize_mono(partner))
                rm = _single(_normalize_mono(rest))
                if pm is None or rm is None or pm == m or pm not in p:
                    continue
                if p[pm] != p[m]:
                    continue
                k = p.pop(m)
                p.pop(pm)
                _poly_add_into(p, {rm: k})
                changed = True
                break
        if not changed:
            break
    return p


def _single(p: Poly):
    if len(p) == 1:
        (m, c), = p.items()
        if c == 1:
            return m
    return None


def from_poly(p: Poly) -> Expr:
    terms = []
    for m, c in _sorted_terms(p):
        factors = [a if e == 1 else _mark(Pow(a, e)) for a, e in m]
        if not factors:
            terms.append(_mark(Num(c)))
        elif c == 1 and len(factors) == 1:
            terms.append(factors[0])
        elif c == 1:
            terms.append(_mark(Mul(factors)))
        else:
            terms.append(_mark(Mul([_mark(Num(c))] + factors)))
    if not terms:
        r = Num(0)
    elif len(terms) == 1:
        r = terms[0]
    else:
        r = Add(terms)
    r = _mark(r)
    r._poly = p
    return r


def _mark(e: Expr) -> Expr:
    e._canon = True
    return e


@lru_cache(maxsize=200_000)
def _canon_cached(e: Expr) -> Expr:
    return from_poly(to_poly(e))


def canonicalize(e: Expr) -> Expr:
    """Canonical form of ``e``; idempotent and total."""
    if getattr(e, "_canon", False):
        return e
    return _canon_cached(e)


# ---------------------------------------------------------------- functions

def _neg(e: Expr) -> Expr:
    return canonicalize(Mul((Num(-1), e)))


def _exact_num(e: Expr):
    return e.value if isinstance(e, Num) else None


def _simplify_func(cls, args) -> Expr:
    if cls in (Sin, Cos, Tan):
        return _trig(cls, args[0])
    x = args[0]
    v = _exact_num(x)
    if cls is Asin:
        table = {0: ZERO, 1: Fraction(1, 2), -1: Fraction(-1, 2),
                 Fraction(1, 2): Fraction(1, 6), Fraction(-1, 2): Fraction(-1, 6)}
        if v is not None and v in table:
            t = table[v]
            return ZERO if t is ZERO else canonicalize(Mul((Num(t), PI)))
        if _is_negative_leading(to_poly(x)):
            return _neg(Asin(_neg(x)))
        return Asin(x)
    if cls is Acos:
        table = {1: 0, -1: 1, 0: Fraction(1, 2), Fraction(1, 2): Fraction(1, 3),
                 Fraction(-1, 2): Fraction(2, 3)}
        if v is not None and v in table:
            return canonicalize(Mul((Num(table[v]), PI)))
        return Acos(x)
    if cls is Sqrt:
        if v is not None and v >= 0:
            n, d = v.numerator, v.denominator
            rn, rd = isqrt(n), isqrt(d)
            if rn * rn == n and rd * rd == d:
                return Num(Fraction(rn, rd))
        return Sqrt(x)
    if cls is Atan2:
        y, xx = args
        vy, vx = _exact_num(y), _exact_num(xx)
        if vy is not None and vx is not None:
            if vy == 0 and vx > 0:
                return ZERO
            if vy == 0 and vx < 0:
                return PI
            if vx == 0 and vy > 0:
                return canonicalize(Mul((Num(Fraction(1, 2)), PI)))
            if vx == 0 and vy < 0:
                return canonicalize(Mul((Num(Fraction(-1, 2)), PI)))
        return Atan2(y, xx)
    raise TypeError(cls)


_SIN_SHIFT = [(Sin, 1), (Cos, 1), (Sin, -1), (Cos, -1)]
_COS_SHIFT = [(Cos, 1), (Sin, -1), (Cos, -1), (Sin, 1)]


def _trig(cls, arg: Expr) -> Expr:
    p = dict(to_poly(arg))
    q = p.pop(PI_MONO, Fraction(0))
    sign = 1
    if _is_negative_leading(p):
        p = {m: -c for m, c in p.items()}
        q = -q
        if cls in (Sin, Tan):
            sign = -sign
    q %= 2
    k = int(q * 2)          # whole quarter turns
    r = q - Fraction(k, 2)  # remainder in [0, pi/2)
    if cls is Tan:
        inv = k % 2 == 1
        fn = Tan
        if inv:
            sign = -sign
    else:
        fn, s = (_SIN_SHIFT if cls is Sin else _COS_SHIFT)[k % 4]
        sign *= s
        inv = False
    base = dict(p)
    if r:
        base[PI_MONO] = r
    if not base:
        if fn is Cos:
            val: Expr = ONE
        elif inv:
            return Pow(ZERO, -1)
        else:
            val = ZERO
    else:
        val = _mark(fn(from_poly(base)))
        if inv:
            val = Pow(val, -1)
    if sign < 0:
        return _neg(val)
    return val if not inv else canonicalize(val)
