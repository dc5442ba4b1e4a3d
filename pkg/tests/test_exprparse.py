from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from strategies import SYMS, exprs
from symik.exprcore import (Atan2, Cos, Kind, Mul, Num, PiConst, Sym,
                            canonicalize)
from symik.exprparse import (ExprSyntaxError, UnknownIdentifier, parse_expr,
                             print_expr)
from symik.kinmodel import pose_symbols

TABLE = {s.name: s for s in SYMS}
TABLE.update(pose_symbols())
TABLE["l_4"] = Sym("l_4", Kind.CONSTANT)
TABLE["th_4"] = Sym("th_4", Kind.REVOLUTE)


def test_minus_half_pi():
    e = parse_expr("-pi/2", TABLE)
    assert isinstance(e, Mul)
    assert e.args[0] == Num(Fraction(-1, 2)) and isinstance(e.args[1], PiConst)


def test_symbol():
    assert parse_expr("th_2", TABLE) == TABLE["th_2"]


def test_product_round_trip():
    e = parse_expr("l_4*cos(th_4)", TABLE)
    assert e == canonicalize(TABLE["l_4"] * Cos(TABLE["th_4"]))
    assert print_expr(e) == "l_4*cos(th_4)"


def test_print_examples():
    assert print_expr(Num(1)) == "1"
    px, py = TABLE["Px"], TABLE["Py"]
    assert print_expr(Atan2(px, -py)) == "atan2(Px, -Py)"


def test_branch_labels_resolve():
    e = parse_expr("th_1s2 + 1", TABLE)
    assert TABLE["th_1"].at_branch(2) in e.args


def test_decimal_literals_are_exact():
    assert parse_expr("0.5", TABLE) == Num(Fraction(1, 2))


@pytest.mark.parametrize("text, offset", [("1 +", 3), ("sin(1", 5), ("2 $ 3", 2), ("", 0), ("(1))", 3)])
def test_syntax_errors_carry_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text, TABLE)
    assert info.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        parse_expr("q_9 + 1", TABLE)
    assert info.value.name == "q_9"


@settings(max_examples=500)
@given(exprs)
def test_parse_print_round_trip(e):
    c = canonicalize(e)
    assert parse_expr(print_expr(c), TABLE) == c


ALPHABET = list("0123456789.+-*/(), ") + ["pi", "sin", "cos", "atan2", "sqrt", "th_1", "Px", "zz"]


@settings(max_examples=500)
@given(st.lists(st.sampled_from(ALPHABET), min_size=1, max_size=12).map("".join))
def test_parser_is_total(text):
    try:
        parse_expr(text, TABLE)
    except (ExprSyntaxError, UnknownIdentifier):
        pass
