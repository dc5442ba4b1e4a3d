"""Text grammar for expressions used in robot files.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := number | ident | 'pi' | '-' factor | '(' expr ')'
            | func '(' expr (',' expr)? ')'
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Mapping, Tuple

from .exprcore.expr import (FUNCS, Add, Atan2, Expr, Mul, Num, PiConst, Pow,
                            Sym, _Func, canonicalize)

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/(),]))")
_LABEL = re.compile(r"^(?P<base>.+)s(?P<branch>[1-9]\d*)$")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifier(ValueError):
    def __init__(self, name: str, offset: int = -1):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r}")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                                  len(text) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, table: Mapping[str, Sym]):
        self.toks = _tokenize(text)
        self.i = 0
        self.table = table

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str):
        k, v, pos = self.take()
        if k != "op" or v != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)

    def expr(self) -> Expr:
        node = self.term()
        while True:
            k, v, _ = self.peek()
            if k == "op" and v in "+-":
                self.take()
                rhs = self.term()
                node = Add((node, rhs if v == "+" else Mul((Num(-1), rhs))))
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            k, v, _ = self.peek()
            if k == "op" and v in "*/":
                self.take()
                rhs = self.factor()
                node = Mul((node, rhs if v == "*" else Pow(rhs, -1)))
            else:
                return node

    def factor(self) -> Expr:
        k, v, pos = self.take()
        if k == "num":
            return Num(Fraction(v))
        if k == "op" and v == "-":
            return Mul((Num(-1), self.factor()))
        if k == "op" and v == "(":
            node = self.expr()
            self.expect(")")
            return node
        if k == "id":
            if v in FUNCS:
                self.expect("(")
                args = [self.expr()]
                if FUNCS[v] is Atan2:
                    self.expect(",")
                    args.append(self.expr())
                self.expect(")")
                return FUNCS[v](*args)
            if v == "pi":
                return PiConst()
            return self.ident(v, pos)
        if k == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {v!r}", pos)

    def ident(self, name: str, pos: int) -> Sym:
        if name in self.table:
            return self.table[name]
        m = _LABEL.match(name)
        if m and m.group("base") in self.table:
            return self.table[m.group("base")].at_branch(int(m.group("branch")))
        raise UnknownIdentifier(name, pos)


def parse_expr(text: str, symbol_table: Mapping[str, Sym]) -> Expr:
    """Parse ``text`` into a canonical expression.  Identifiers must be in
    ``symbol_table`` (branch labels such as ``th_1s2`` resolve through their
    base name)."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    p = _Parser(text, symbol_table)
    node = p.expr()
    k, v, pos = p.peek()
    if k != "end":
        raise ExprSyntaxError(f"unexpected {v!r}", pos)
    return canonicalize(node)


# ---------------------------------------------------------------- printing

def _is_negative(e: Expr) -> bool:
    if isinstance(e, Num):
        return e.value < 0
    return isinstance(e, Mul) and isinstance(e.args[0], Num) and e.args[0].value < 0


def _negate_term(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(-e.value)
    c = -e.args[0].value
    rest = e.args[1:]
    if c == 1:
        return rest[0] if len(rest) == 1 else Mul(rest)
    return Mul((Num(c),) + rest)


def _atom(e: Expr) -> str:
    if isinstance(e, Add):
        return f"({_p(e)})"
    if isinstance(e, (Mul, Pow)) or (isinstance(e, Num) and (e.value < 0 or e.value.denominator != 1)):
        return f"({_p(e)})"
    return _p(e)


def _mul(coeff: Fraction, factors) -> str:
    num, den = [], []
    for f in factors:
        if isinstance(f, Pow):
            (num if f.exp > 0 else den).extend([_atom(f.base)] * abs(f.exp))
        else:
            num.append(_atom(f))
    sign = "-" if coeff < 0 else ""
    c = abs(coeff)
    if c.numerator != 1:
        num.insert(0, str(c.numerator))
    if c.denominator != 1:
        den.insert(0, str(c.denominator))
    s = "*".join(num) if num else "1"
    return sign + s + "".join("/" + d for d in den)


def _p(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, PiConst):
        return "pi"
    if isinstance(e, Sym):
        return e.label
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            if i == 0:
                parts.append(_p(t))
            elif _is_negative(t):
                parts.append(" - " + _p(_negate_term(t)))
            else:
                parts.append(" + " + _p(t))
        return "".join(parts)
    if isinstance(e, Mul):
        if isinstance(e.args[0], Num):
            return _mul(e.args[0].value, e.args[1:])
        return _mul(Fraction(1), e.args)
    if isinstance(e, Pow):
        return _mul(Fraction(1), (e,))
    if isinstance(e, _Func):
        return f"{e.fname}({', '.join(_p(a) for a in e.args)})"
    raise TypeError(type(e).__name__)


def print_expr(e: Expr) -> str:
    """Render ``e`` in the grammar; ``parse_expr`` inverts it."""
    return _p(canonicalize(e))
