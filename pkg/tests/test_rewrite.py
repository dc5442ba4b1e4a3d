import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symik.exprcore import Cos, Kind, Sin, Sym, canonicalize, eval_numeric, free_symbols
from symik.kinmodel import (ScalarEquation, build_matrix_equations, builtin_robot,
                            extract_and_classify, numeric_fk, pose_bindings)
from symik.rewrite import (RELATION, apply_substitution, apply_sum_of_angle,
                           retire_sums, rewrite_buckets)
from symik.verify import random_seed

th1, th2, th3 = (Sym(f"th_{i}", Kind.REVOLUTE) for i in (1, 2, 3))
px, py = Sym("Px", Kind.POSE), Sym("Py", Kind.POSE)
a2 = Sym("a_2", Kind.CONSTANT)


def _holds(eq, b, tol=1e-9):
    return abs(eval_numeric(eq.lhs, b) - eval_numeric(eq.rhs, b)) <= tol


def test_sum_of_angle_renames_compound_argument():
    eq = ScalarEquation(px, canonicalize(a2 * Cos(th2 + th3) + Sin(th1)))
    reg = {}
    out, new = apply_sum_of_angle([eq], [th1, th2, th3], reg)
    assert [r.combined.name for r in new] == ["th_23"]
    th23 = new[0].combined
    assert th23.kind == Kind.SUM_OF_ANGLE
    assert free_symbols(out[0].rhs) == {a2, th1, th23}
    assert canonicalize(new[0].expansion) == canonicalize(th2 + th3)
    # a second pass reuses the same record
    _, again = apply_sum_of_angle([eq], [th1, th2, th3], reg)
    assert again == [] and len(reg) == 1


def test_differences_get_a_distinct_name():
    eq = ScalarEquation(px, canonicalize(Cos(th2 - th3)))
    _, new = apply_sum_of_angle([eq], [th2, th3], {})
    assert new[0].combined.name == "th_2m3"


def test_solved_constituents_are_left_alone():
    eq = ScalarEquation(px, canonicalize(Cos(th2 + th3)))
    out, new = apply_sum_of_angle([eq], [th3], {})
    assert new == [] and out == [eq]


def test_retire_expands_once_constituents_are_solved():
    eq = ScalarEquation(px, canonicalize(Cos(th2 + th3)))
    reg = {}
    out, new = apply_sum_of_angle([eq], [th2, th3], reg)
    th23 = new[0].combined
    eqs = out + [new[0].equation()]
    kept, retired = retire_sums(eqs, reg, [th23])
    assert retired == [th23]
    assert all(e.origin != RELATION for e in kept)
    assert th23 not in free_symbols(kept[0].rhs)


def test_substitution_lowers_unknown_count():
    e1 = ScalarEquation(py, canonicalize(a2 * Cos(th1) * Sin(th2) + Sin(th3)))
    e2 = ScalarEquation(px, canonicalize(a2 * Cos(th1) * Sin(th2)))
    out, passes = apply_substitution([e1, e2], [th1, th2, th3])
    assert passes >= 1
    assert free_symbols(out[0].lhs) | free_symbols(out[0].rhs) == {py, px, th3}
    assert out[1] == e2


def test_substitution_without_match_is_identity():
    e1 = ScalarEquation(py, canonicalize(Sin(th3)))
    e2 = ScalarEquation(px, canonicalize(Cos(th1)))
    out, _ = apply_substitution([e1, e2], [th1, th3])
    assert out == [e1, e2]


@pytest.mark.parametrize("name", ["puma", "chair_helper", "olson13"])
@settings(max_examples=8)
@given(st.integers(0, 2 ** 32 - 1))
def test_rewrites_preserve_meaning(name, seed):
    r = _robot(name)
    b0 = _buckets(name)
    rng = np.random.default_rng(seed)
    s = random_seed(r, rng)
    b = {**s, **pose_bindings(numeric_fk(r, s))}
    reg = {}
    out = rewrite_buckets(b0, r.unknowns, reg)
    for rec in reg.values():
        b[rec.combined.name] = eval_numeric(rec.expansion, b)
    for eq in out.all():
        assert _holds(eq, b), eq
    # unknown count never grows
    assert max(len(e.unknowns) for e in out.all()) <= max(len(e.unknowns) for e in b0.all())


_cache = {}


def _robot(name):
    if name not in _cache:
        r = builtin_robot(name)
        _cache[name] = (r, extract_and_classify(build_matrix_equations(r), r.unknowns))
    return _cache[name][0]


def _buckets(name):
    _robot(name)
    return _cache[name][1]
