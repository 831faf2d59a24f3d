from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from sheaflogic.corpus import CorpusConfig, generate
from sheaflogic.fincat import FinSet, surj
from sheaflogic.multiteam import NondetVar
from sheaflogic.oracle import (
    Assignment,
    canonical_witnesses,
    force,
    literal_witnesses,
    locality_invariant,
    metamorphic_check,
    permutation_invariant,
    random_surjection,
    restriction_invariant,
    witness_bound,
)
from sheaflogic.parser import parse
from sheaflogic.signature import uniform
from sheaflogic.syntax import SortError
from sheaflogic.teams import evaluate, team_of_assignment

SIG = uniform({"A": 2, "B": 2})


def rho(**vals) -> Assignment:
    n = len(next(iter(vals.values())))
    return Assignment(n, {k: NondetVar(FinSet(n), SIG.carrier("A"), tuple(v)) for k, v in vals.items()})


def test_fresh_copy_example():
    r = rho(x=[0, 1, 0])
    f = parse("exists y:A. equiv(x ; y) and not eq(x, y)", default_sort="A")
    assert force(r, f, SIG)
    # the witness from the example, checked directly
    w = rho(x=[0, 1, 0], y=[1, 0, 1])
    assert force(w, f.body, SIG)


def test_atom_examples():
    assert force(rho(x=[0, 1]), parse("eq(x, x)", default_sort="A"), SIG)
    assert not force(rho(x=[0, 1], y=[0, 1]), parse("indep(x ; y |)", default_sort="A"), SIG)


def test_unbound_variable_rejected():
    with pytest.raises(SortError):
        force(rho(x=[0]), parse("eq(x, y)", default_sort="A"), SIG)


def test_witness_bound_examples():
    assert witness_bound(3, 2) == 6
    assert witness_bound(1, 3) == 3
    assert witness_bound(4, 1) == 4


def test_witness_enumerations():
    A = SIG.carrier("A")
    assert len(list(canonical_witnesses(2, A))) == 9
    lit = list(literal_witnesses(2, A, witness_bound(2, 2)))
    # all witnesses are surjections onto the sample with non-decreasing maps
    assert all(list(g.map) == sorted(g.map) and g.cod.size == 2 for g, _ in lit)
    assert max(g.dom.size for g, _ in lit) == 4
    # every canonical witness image appears among the literal ones
    images = {frozenset(zip(g.map, x)) for g, x in lit}
    assert all(frozenset(zip(g.map, x)) in images for g, x in canonical_witnesses(2, A))


def test_metamorphic_examples():
    f = parse("exists y:A. indep(x ; y |) and equiv(x ; y)", default_sort="A")
    r = rho(x=[0, 1])
    assert metamorphic_check(r, f, SIG, surj([0, 0, 1]))
    assert metamorphic_check(r, f, SIG)
    extended = rho(x=[0, 1], q=[1, 1])
    assert force(extended, f, SIG) == force(r, f, SIG)


CORPUS = list(generate(CorpusConfig(size=60, seed=7, max_sample=2)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 2 ** 32))
def test_sheaf_property_on_corpus(entry, seed):
    c = random_surjection(random.Random(seed), entry.rho.sample, entry.rho.sample + 2)
    assert restriction_invariant(entry.rho, entry.formula, entry.sig, c)
    assert locality_invariant(entry.rho, entry.formula, entry.sig)


@pytest.mark.parametrize("entry", CORPUS[:15], ids=lambda e: f"omega={e.rho.sample}")
def test_permutation_invariance(entry):
    for perm in itertools.permutations(range(entry.rho.sample)):
        assert permutation_invariant(entry.rho, entry.formula, entry.sig, perm)


@pytest.mark.parametrize("entry", CORPUS[:25], ids=lambda e: f"omega={e.rho.sample}")
def test_literal_and_canonical_agree(entry):
    a = force(entry.rho, entry.formula, entry.sig)
    b = force(entry.rho, entry.formula, entry.sig, mode="literal")
    team = team_of_assignment(entry.rho.sample, entry.rho.bindings)
    assert a == b == evaluate(entry.formula, team, entry.sig)


def test_assignment_json_round_trip():
    r = rho(x=[0, 1, 1], y=[1, 1, 0])
    assert Assignment.from_json(r.to_json(), SIG) == r
    with pytest.raises(SortError):
        Assignment.from_json({"omega": 2}, SIG)
