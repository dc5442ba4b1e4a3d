"""Numeric evaluation of expression trees with typed domain errors."""
from __future__ import annotations

import enum
import math
from typing import Mapping

from .expr import (Acos, Add, Asin, Atan2, Cos, Expr, Mul, Num, PiConst, Pow,
                   Sin, Sqrt, Sym, Tan)

CLAMP_EPS = 1e-9
# |divisor| or |atan2 args| at or below this are treated as exact zeros
ZERO_EPS = 1e-12


class DomainKind(enum.IntEnum):
    ASIN_OUT_OF_RANGE = 1
    ACOS_OUT_OF_RANGE = 2
    SQRT_NEGATIVE = 3
    ATAN2_BOTH_ZERO = 4
    DIVISION_BY_ZERO = 5
    NON_FINITE = 6


class DomainError(ArithmeticError):
    """An intermediate value left the domain of a function."""

    def __init__(self, kind: DomainKind, expr: Expr, value: float):
        self.kind = DomainKind(kind)
        self.expr = expr
        self.value = value
        super().__init__(f"{self.kind.name} at value {value!r}")


class UnboundSymbol(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound symbol {name!r}")


def clamp_unit(x: float, kind: DomainKind, expr: Expr) -> float:
    if x > 1.0:
        if x > 1.0 + CLAMP_EPS:
            raise DomainError(kind, expr, x)
        return 1.0
    if x < -1.0:
        if x < -1.0 - CLAMP_EPS:
            raise DomainError(kind, expr, x)
        return -1.0
    return x


def eval_numeric(e: Expr, b: Mapping[str, float]) -> float:
    """Evaluate ``e`` with symbol values looked up by label in ``b``."""
    memo: dict = {}
    v = _ev(e, b, memo)
    if not math.isfinite(v):
        raise DomainError(DomainKind.NON_FINITE, e, v)
    return v


def _ev(e: Expr, b, memo) -> float:
    try:
        return memo[id(e)]
    except KeyError:
        pass
    if isinstance(e, Num):
        v = float(e.value)
    elif isinstance(e, PiConst):
        v = math.pi
    elif isinstance(e, Sym):
        try:
            v = float(b[e.label])
        except KeyError:
            raise UnboundSymbol(e.label) from None
    elif isinstance(e, Add):
        v = math.fsum(_ev(a, b, memo) for a in e.args)
    elif isinstance(e, Mul):
        v = 1.0
        for a in e.args:
            v *= _ev(a, b, memo)
    elif isinstance(e, Pow):
        x = _ev(e.base, b, memo)
        if e.exp < 0:
            if abs(x) <= ZERO_EPS:
                raise DomainError(DomainKind.DIVISION_BY_ZERO, e, x)
            v = 1.0 / x ** (-e.exp)
        else:
            v = x ** e.exp
    elif isinstance(e, Sin):
        v = math.sin(_ev(e.arg, b, memo))
    elif isinstance(e, Cos):
        v = math.cos(_ev(e.arg, b, memo))
    elif isinstance(e, Tan):
        v = math.tan(_ev(e.arg, b, memo))
    elif isinstance(e, Asin):
        v = math.asin(clamp_unit(_ev(e.arg, b, memo), DomainKind.ASIN_OUT_OF_RANGE, e))
    elif isinstance(e, Acos):
        v = math.acos(clamp_unit(_ev(e.arg, b, memo), DomainKind.ACOS_OUT_OF_RANGE, e))
    elif isinstance(e, Sqrt):
        x = _ev(e.arg, b, memo)
        if x < 0.0:
            if x < -CLAMP_EPS:
                raise DomainError(DomainKind.SQRT_NEGATIVE, e, x)
            x = 0.0
        v = math.sqrt(x)
    elif isinstance(e, Atan2):
        y = _ev(e.args[0], b, memo)
        x = _ev(e.args[1], b, memo)
        if abs(y) <= ZERO_EPS and abs(x) <= ZERO_EPS:
            raise DomainError(DomainKind.ATAN2_BOTH_ZERO, e, 0.0)
        v = math.atan2(y, x)
        if v == -math.pi:
            v = math.pi
    else:
        raise TypeError(f"cannot evaluate {type(e).__name__}")
    if math.isnan(v):
        raise DomainError(DomainKind.NON_FINITE, e, v)
    memo[id(e)] = v
    return v
