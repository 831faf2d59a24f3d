from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from sheaflogic.parser import parse
from sheaflogic.schanuel import (
    IopMap,
    NameTuple,
    SchanuelModel,
    all_tuples,
    cond_indep_tuples,
    eval_nominal,
    iop_compose,
    iop_identity,
    iop_independent_pullback,
    iop_is_independent,
    iop_is_independent_pullback,
    name_support,
    nominal_signature,
    orbit_equiv,
    quantifier_choices,
    restrict_tuple,
    valid_nominal,
)
from sheaflogic.signature import NameSort, Signature
from sheaflogic.syntax import SortError, free_vars

from .strategies import POOL, formulas

SIG = nominal_signature()
# the strategy's sorts A and B become name sorts of arity 1 and 2
NSIG = Signature({"A": NameSort("A", 1), "B": NameSort("B", 2)})


def test_restrict_tuple_examples():
    assert restrict_tuple(NameTuple(2, (0, 1)), (0, 1), world=3) == NameTuple(3, (0, 1))
    assert restrict_tuple(NameTuple(2, (0, 0)), (1, 0)).entries == (1, 1)
    assert restrict_tuple(NameTuple(2, (0, 1)), (2, 0)) == NameTuple(3, (2, 0))
    with pytest.raises(ValueError):
        restrict_tuple(NameTuple(2, (0, 1)), (1, 1))


def test_support_examples():
    assert name_support(NameTuple(2, (0, 1, 0))) == {0, 1}
    assert name_support(NameTuple(0, ())) == frozenset()
    assert name_support(NameTuple(3, (2, 2))) == {2}


def test_orbit_equiv_examples():
    assert orbit_equiv(NameTuple(3, (0, 1)), NameTuple(3, (2, 1)))
    assert not orbit_equiv(NameTuple(3, (0, 0)), NameTuple(3, (0, 1)))
    t = NameTuple(3, (2, 0, 2))
    assert orbit_equiv(t, t)


def test_cond_indep_examples():
    x, y = NameTuple(3, (0, 1)), NameTuple(3, (1, 2))
    assert cond_indep_tuples(x, y, NameTuple(3, (1,)))
    assert not cond_indep_tuples(x, y, NameTuple(3, (2,)))
    assert cond_indep_tuples(NameTuple(3, (0,)), NameTuple(3, (1, 2)), NameTuple(3, ()))


def test_pushout_examples():
    r, s = IopMap(2, 1, (0,)), IopMap(2, 1, (0,))
    p, q = iop_independent_pullback(r, s)
    assert p.dom == 3 and iop_is_independent_pullback(p, q, r, s)
    i = iop_identity(2)
    p, q = iop_independent_pullback(i, i)
    assert p == q == i
    # both sides share a name that the base does not account for
    r = s = IopMap(1, 0, ())
    p, q = IopMap(1, 1, (0,)), IopMap(1, 1, (0,))
    assert not iop_is_independent(p, q, r, s)


def test_compose_is_injection_composite():
    f, g = IopMap(3, 2, (2, 0)), IopMap(2, 1, (1,))
    assert iop_compose(f, g) == IopMap(3, 1, (0,))


def test_eval_examples():
    x = NameTuple(1, (0,))
    assert eval_nominal(parse("exists y:N. not eq(x, y)", context={"x": "N"}), 1, {"x": x}, SIG)
    assert eval_nominal(parse("forall x:N. equiv(x ; x)"), 0, {}, SIG)
    f = parse("forall x:N. forall y:N. indep(x ; y |)")
    for w in range(4):
        assert not eval_nominal(f, w, {}, SIG)
    assert valid_nominal(f, 3, SIG) == (False, 0)


def test_eval_rejects_relations_and_unbound():
    with pytest.raises(SortError):
        eval_nominal(parse("eq(x, y)", default_sort="N"), 1, {"x": NameTuple(1, (0,))}, SIG)


def test_quantifier_choices_reduced():
    full = list(quantifier_choices(2, frozenset(), 1, reduce=False))
    assert [e for _, e in full] == [(0,), (1,), (2,)]
    red = list(quantifier_choices(2, frozenset(), 1))
    assert [e for _, e in red] == [(0,), (2,)]
    red = list(quantifier_choices(2, frozenset({0}), 1))
    assert [e for _, e in red] == [(0,), (1,), (2,)]


def _assignment(data, f, world):
    rho = {}
    for v in sorted(free_vars(f), key=lambda v: v.name):
        k = NSIG.arity(v.sort)
        rho[v.name] = NameTuple(world, tuple(data.draw(st.lists(st.integers(0, world - 1), min_size=k, max_size=k)) if world else ()))
    return rho


@settings(max_examples=50, deadline=None)
@given(formulas(depth=3, relations=False), st.integers(1, 2), st.data())
def test_reduction_matches_full_enumeration(f, world, data):
    rho = _assignment(data, f, world)
    assert eval_nominal(f, world, rho, NSIG) == eval_nominal(f, world, rho, NSIG, reduce=False)


@settings(max_examples=50, deadline=None)
@given(formulas(depth=3, relations=False), st.integers(1, 3), st.data())
def test_equivariance(f, world, data):
    rho = _assignment(data, f, world)
    perm = data.draw(st.permutations(range(world)))
    moved = {n: restrict_tuple(t, tuple(perm)) for n, t in rho.items()}
    assert eval_nominal(f, world, rho, NSIG) == eval_nominal(f, world, moved, NSIG)


@settings(max_examples=50, deadline=None)
@given(formulas(depth=2, relations=False), st.integers(1, 2), st.data())
def test_restriction_to_larger_world(f, world, data):
    # forcing is stable along inclusions of worlds
    rho = _assignment(data, f, world)
    bigger = {n: NameTuple(world + 1, t.entries) for n, t in rho.items()}
    assert eval_nominal(f, world, rho, NSIG) == eval_nominal(f, world + 1, bigger, NSIG)


@pytest.mark.parametrize("world", range(4))
def test_support_of_restriction_is_image(world):
    m = SchanuelModel()
    for t in all_tuples(world, 2):
        for y in range(world, world + 2):
            for i in m.cat.hom(y, world):
                moved = m.restrict(t, i)
                assert name_support(moved) == {i.emb[e] for e in name_support(t)}
                assert m.support(moved).obj == m.support(t).obj


def test_pool_sorts_are_name_sorts():
    assert set(POOL.values()) <= set(NSIG.sorts)
