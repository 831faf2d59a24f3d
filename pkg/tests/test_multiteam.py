from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from sheaflogic.fincat import FinSet, MapError, compose, identity, surj
from sheaflogic.multiteam import (
    NondetVar,
    NotInvariant,
    SortValueSet,
    box_member,
    check_subsheaf_closure,
    cond_indep,
    descend,
    diamond_member,
    equiextensive,
    is_invariant,
    restrict,
    support,
    tuple_var,
)

from .strategies import nondet_vars, surjections

AB = SortValueSet("S", ("a", "b"))
A3 = SortValueSet.of_size("A", 3)


def nv(values, sort=AB):
    return NondetVar(FinSet(len(values)), sort, tuple(values))


def test_restrict_examples():
    assert restrict(nv("ab"), surj([0, 0, 1])).values == tuple("aab")
    assert restrict(nv("ab"), identity(2)) == nv("ab")
    assert set(restrict(nv("aa"), surj([0, 1, 1])).values) == {"a"}


def test_invariance_and_descent():
    c = surj([0, 0, 1])
    assert is_invariant(nv("aab"), c)
    assert not is_invariant(nv("abb"), c)
    assert is_invariant(nv("abb"), surj([2, 0, 1]))
    assert descend(nv("aab"), c) == nv("ab")
    assert descend(nv("abb"), identity(3)) == nv("abb")
    with pytest.raises(NotInvariant):
        descend(nv("abb"), c)


def test_equiextensive_examples():
    assert equiextensive(nv("aba"), nv("bab"))
    assert not equiextensive(nv("aaa"), nv("aba"))
    with pytest.raises(MapError):
        equiextensive(nv("ab"), nv([0, 1], A3))


def test_cond_indep_examples():
    Z = SortValueSet.of_size("Z", 1)
    two = SortValueSet.of_size("B", 2)
    x, y = nv([0, 0, 1, 1], two), nv([0, 1, 0, 1], two)
    assert cond_indep(x, y, nv([0] * 4, Z))
    assert not cond_indep(nv([0, 1], two), nv([0, 1], two), nv([0, 0], Z))


@given(nondet_vars(sample=3), nondet_vars(sample=3))
def test_conditioning_on_self(x, y):
    assert cond_indep(x, y, y)


def test_box_diamond_examples():
    two = SortValueSet.of_size("B", 2)
    assert box_member(nv([1, 1], two), {1})
    assert not box_member(nv([0, 1], two), {1})
    assert diamond_member(nv([0, 1], two), {1})
    assert box_member(nv([0, 1], two), two.values)


def test_support_examples():
    s = support(nv("aba"))
    assert s.obj.size == 2 and s.map.map == (0, 1, 0) and s.elem.values == ("a", "b")
    assert support(nv([2, 0, 1], A3)).map == identity(3)
    assert support(nv("aaa")).obj.size == 1


@given(nondet_vars(), st.data())
def test_restrict_then_descend(x, data):
    c = data.draw(surjections(cod=x.sample.size))
    d = data.draw(surjections(cod=c.dom.size))
    assert is_invariant(restrict(x, c), c)
    assert descend(restrict(x, c), c) == x
    assert restrict(restrict(x, c), d) == restrict(x, compose(d, c))


@given(nondet_vars(), nondet_vars())
def test_equiextension_restriction_stable(x, y):
    if x.sample != y.sample or x.sort != y.sort:
        return
    c = surj(list(range(x.sample.size)) * 2)
    assert equiextensive(x, y) == equiextensive(restrict(x, c), restrict(y, c))


def test_tuple_var_joint_values():
    t = tuple_var(FinSet(3), [nv("aba"), nv("bba")])
    assert t.values == (("a", "b"), ("b", "b"), ("a", "a"))


@pytest.mark.parametrize(
    "relation, sorts",
    [
        (equiextensive, [A3, A3]),
        (cond_indep, [SortValueSet.of_size("A", 2)] * 3),
        (lambda x: box_member(x, ()), [A3]),
        (lambda x: diamond_member(x, (0,)), [A3]),
    ],
    ids=["equiextension", "cond-indep", "box-empty", "diamond"],
)
def test_subsheaf_closure(relation, sorts):
    ok, cex = check_subsheaf_closure(relation, sorts, 3)
    assert ok, cex

