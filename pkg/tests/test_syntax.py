from __future__ import annotations

import pytest
from hypothesis import given

from sheaflogic.multiteam import SortValueSet
from sheaflogic.parser import ParseError, parse, parse_document
from sheaflogic.signature import RelDecl, Signature, uniform
from sheaflogic.syntax import (
    Eq,
    Equiv,
    Exists,
    Forall,
    Indep,
    SortError,
    Var,
    free_vars,
    quantifier_depth,
    substitute,
    to_text,
    universal_closure,
)

from .strategies import POOL, RELATIONS, formulas

x, y, z = Var("x", "A"), Var("y", "A"), Var("z", "A")


def _sig() -> Signature:
    sig = uniform({"A": 2, "B": 2})
    for name, sorts in RELATIONS.items():
        sig.relations[name] = RelDecl(name, sorts, "box", frozenset())
    return sig


@given(formulas(depth=5))
def test_print_parse_round_trip(f):
    text = to_text(f)
    assert parse(text, context=dict(POOL), signature=_sig()) == f


@given(formulas(depth=3))
def test_printing_is_stable(f):
    text = to_text(f)
    assert to_text(parse(text, context=dict(POOL), signature=_sig())) == text


def test_parse_examples():
    f = parse("forall x:A. exists y:A. equiv(x ; y) and not eq(x,y)")
    assert isinstance(f, Forall) and isinstance(f.body, Exists)
    assert quantifier_depth(f) == 2
    g = parse("indep(x ; y | )", default_sort="A")
    assert g == Indep((x,), (y,), ())
    assert parse("indep(x ; y)", default_sort="A") == g


def test_parse_grouped_vectors():
    f = parse("indep(x ; (y, z) |)", default_sort="A")
    assert f == Indep((x,), (y, z), ())


def test_sort_mismatch_in_equiv():
    with pytest.raises(SortError):
        parse("equiv(x,y ; y,z)", context={"x": "A", "y": "B"})


def test_rebinding_with_other_sort_is_allowed():
    f = parse("forall x:A. exists x:B. eq(x, x)")
    assert f.body.var.sort == "B"


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("eq(x,")
    assert info.value.line == 1


def test_free_vars_examples():
    assert free_vars(Eq(x, y)) == {x, y}
    assert free_vars(Exists(y, Eq(x, y))) == {x}
    assert free_vars(Indep((x,), (y,), (z,))) == {x, y, z}


def test_substitute_examples():
    z1, z2 = Var("z1", "A"), Var("z2", "A")
    assert substitute(Eq(z1, z2), (z1, z2), (x, y)) == Eq(x, y)
    f = substitute(Exists(x, Eq(x, z1)), (z1,), (x,))
    assert isinstance(f, Exists) and f.var.name != "x" and f.body == Eq(f.var, x)
    with pytest.raises(SortError):
        substitute(Eq(z1, z2), (z1,), (x,))


def test_universal_closure_closes():
    f = universal_closure(Equiv((x, y), (y, z)))
    assert not free_vars(f)


def test_document_declarations():
    doc = parse_document(
        """
        sort A = {a, b, c}   # three values
        sort B = 2
        rel R(A, B) = diamond {(a, 0), (c, 1)}
        var x, y : A
        equiv(x ; y)
        forall u:B. R(x, u)
        """
    )
    assert doc.signature.carrier("A") == SortValueSet("A", ("a", "b", "c"))
    assert doc.signature.relations["R"].tuples == frozenset({("a", 0), ("c", 1)})
    assert len(doc.formulas) == 2
    assert doc.formulas[0] == Equiv((x,), (y,))


def test_document_name_sort():
    doc = parse_document("sort N = names 2\nforall x:N. equiv(x ; x)")
    assert doc.signature.arity("N") == 2


def test_relation_arity_and_sorts_checked():
    with pytest.raises(ParseError):
        parse("P(x, x)", context={"x": "A"}, signature=_sig())
    with pytest.raises(SortError):
        parse("Q(x, x)", context={"x": "A"}, signature=_sig())
