from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from sheaflogic.fincat import (
    CommutingSquare,
    FinSet,
    MapError,
    canonical_surjections,
    coconfluence_complete,
    compose,
    descend_map,
    identity,
    image_factorise,
    independent_pullback,
    is_independent_pullback,
    is_independent_square,
    pairing,
    surj,
    surjections,
)

from .strategies import surjections as surj_st, surjections_from


def test_compose_examples():
    f = surj([0, 1, 0])
    assert compose(f, identity(2)) == f
    assert compose(f, surj([0, 0])).map == (0, 0, 0)
    assert compose(identity(3), identity(3)) == identity(3)


def test_compose_rejects_mismatch():
    with pytest.raises(MapError):
        compose(surj([0, 1, 0]), identity(3))


def test_not_surjective_rejected():
    with pytest.raises(MapError):
        surj([0, 0], cod=2)


@given(surj_st(), st.data())
def test_compose_associative(f, data):
    g = data.draw(surjections_from(f.cod.size))
    h = data.draw(surjections_from(g.cod.size))
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(identity(f.dom), f) == f


def test_surjection_counts():
    # Stirling numbers of the second kind times k!
    assert len(list(surjections(3, 2))) == 6
    assert len(list(surjections(4, 2))) == 14
    assert len(list(surjections(4, 3))) == 36
    assert len(list(canonical_surjections(4, 2))) == 3
    assert all(list(f.map) == sorted(f.map) for f in canonical_surjections(5, 3))


def test_coconfluence_examples():
    W, u, v = coconfluence_complete(surj([0, 0, 1]), identity(2))
    assert W.labels == ((0, 0), (1, 0), (2, 1))
    W, _, _ = coconfluence_complete(identity(2), identity(2))
    assert W.labels == ((0, 0), (1, 1))
    W, _, _ = coconfluence_complete(surj([0, 0]), surj([0, 0]))
    assert W.size == 4


def test_independent_square_examples():
    r, s = surj([0, 0, 1]), identity(2)
    assert is_independent_square(independent_pullback(r, s))
    assert is_independent_square(CommutingSquare(identity(2), identity(2), surj([0, 0]), surj([0, 0]))) is False
    f = surj([0, 1, 1])
    # identities on opposite sides
    assert is_independent_pullback(CommutingSquare(identity(3), f, f, identity(2)))
    # identities on adjacent sides with a non-injective cospan
    assert not is_independent_square(CommutingSquare(identity(3), identity(3), f, f))


def test_independent_pullback_examples():
    assert independent_pullback(surj([0, 0, 1]), identity(2)).apex.size == 3
    assert independent_pullback(identity(2), identity(2)).apex.size == 2
    assert independent_pullback(surj([0, 0]), surj([0, 0, 0])).apex.size == 6
    # weak but not strong: the apex covers the one pair twice
    doubled = CommutingSquare(surj([0, 0]), surj([0, 0]), identity(1), identity(1))
    assert is_independent_square(doubled) and not is_independent_pullback(doubled)
    # not even weak
    diag = CommutingSquare(identity(2), identity(2), surj([0, 0]), surj([0, 0]))
    assert not is_independent_pullback(diag)


@given(surj_st(), st.data())
def test_independent_pullback_is_pullback(r, data):
    s = data.draw(surj_st(cod=r.cod.size))
    sq = independent_pullback(r, s)
    assert is_independent_pullback(sq)
    assert independent_pullback(s, r).apex.size == sq.apex.size


def test_non_commuting_square_rejected():
    with pytest.raises(MapError):
        CommutingSquare(identity(2), identity(2), identity(2), surj([1, 0]))


def test_image_factorise_examples():
    mid, e, inj = image_factorise(["a", "b", "a"])
    assert mid.size == 2 and e.map == (0, 1, 0) and inj == ("a", "b")
    assert image_factorise([3, 1, 2])[1] == identity(3)
    mid, e, _ = image_factorise([7, 7, 7])
    assert mid.size == 1 and e.map == (0, 0, 0)


def test_pairing_examples():
    p, q = surj([0, 0, 1]), surj([0, 1, 1])
    P, e, p2, q2 = pairing(p, q)
    assert P.labels == ((0, 0), (0, 1), (1, 1))
    assert compose(e, p2) == p and compose(e, q2) == q
    P, e, p2, _ = pairing(p, p)
    assert P.size == 2 and e.map == p.map
    assert pairing(identity(3), p)[1] == identity(3)


@given(surj_st(max_cod=3, max_extra=3), st.data())
def test_pairing_factorises(p, data):
    q = data.draw(st.permutations(p.map).map(lambda v: surj(v)))
    P, e, p2, q2 = pairing(p, q)
    assert compose(e, p2) == p and compose(e, q2) == q
    assert len(set(zip(p2.map, q2.map))) == P.size


@given(surj_st())
def test_descend_map(f):
    assert descend_map(f, f) == identity(f.cod)
    assert descend_map(f, identity(f.dom)) == f
    if f.cod.size > 1:
        assert descend_map(f, surj([0] * f.dom.size)) is None


def test_finset_size_nonnegative():
    with pytest.raises(MapError):
        FinSet(-1)
