"""Hypothesis strategies for random expression trees and bindings."""
import math

from hypothesis import strategies as st

from symik.exprcore import (Add, Atan2, Cos, Kind, Mul, Num, PI, Pow, Sin, Sqrt,
                            Sym)

SYMS = [Sym("th_1", Kind.REVOLUTE), Sym("th_2", Kind.REVOLUTE), Sym("th_3", Kind.REVOLUTE),
        Sym("d_1", Kind.PRISMATIC), Sym("a_2", Kind.CONSTANT), Sym("Px", Kind.POSE)]
NAMES = [s.name for s in SYMS]

nums = st.fractions(min_value=-6, max_value=6, max_denominator=4).map(Num)
leaves = st.one_of(nums, st.sampled_from(SYMS), st.just(PI))


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Add(tuple(xs))),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Mul(tuple(xs))),
        st.tuples(children, st.integers(1, 3)).map(lambda t: Pow(t[0], t[1])),
        children.map(Sin),
        children.map(Cos),
        # domain-safe by construction
        st.tuples(children, children).map(lambda t: Atan2(Add((Num(3), Sin(t[0]))), t[1])),
        children.map(lambda c: Sqrt(Add((Num(1), Pow(c, 2))))),
        children.map(lambda c: Pow(Add((Num(2), Cos(c))), -1)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=8)

bindings = st.fixed_dictionaries(
    {n: st.floats(-math.pi, math.pi, allow_nan=False) for n in NAMES})
