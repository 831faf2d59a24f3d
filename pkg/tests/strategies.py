from __future__ import annotations

from hypothesis import strategies as st

from sheaflogic.fincat import FinSet, FinSurjection, image_factorise
from sheaflogic.multiteam import NondetVar, SortValueSet


@st.composite
def surjections(draw, max_cod: int = 3, max_extra: int = 3, cod: int | None = None):
    n = draw(st.integers(1, max_cod)) if cod is None else cod
    extra = draw(st.integers(0, max_extra))
    values = list(range(n)) + [draw(st.integers(0, n - 1)) for _ in range(extra)]
    values = draw(st.permutations(values))
    return FinSurjection(FinSet(len(values)), FinSet(n), tuple(values))


@st.composite
def nondet_vars(draw, sample: int | None = None, sort_size: int | None = None, max_sample: int = 4):
    n = draw(st.integers(1, max_sample)) if sample is None else sample
    k = draw(st.integers(1, 3)) if sort_size is None else sort_size
    A = SortValueSet.of_size("A", k)
    return NondetVar(FinSet(n), A, tuple(draw(st.lists(st.sampled_from(A.values), min_size=n, max_size=n))))


@st.composite
def surjections_from(draw, dom: int):
    """A surjection out of ``dom``, codomain numbered by first occurrence."""
    values = draw(st.lists(st.integers(0, dom - 1), min_size=dom, max_size=dom))
    return image_factorise(values)[1]


POOL = {"x": "A", "y": "A", "z": "A", "u": "B", "v": "B"}
RELATIONS = {"P": ("A",), "Q": ("A", "B")}


def _var(name: str):
    from sheaflogic.syntax import Var

    return Var(name, POOL[name])


@st.composite
def formulas(draw, depth: int = 5, relations: bool = True):
    """Well-sorted formulas over ``POOL``; every name keeps a fixed sort."""
    from sheaflogic import syntax as sx

    names = sorted(POOL)
    var = st.sampled_from(names).map(_var)
    if depth <= 0 or draw(st.integers(0, 3)) == 0:
        kind = draw(st.sampled_from(["eq", "equiv", "indep", "rel"] if relations else ["eq", "equiv", "indep"]))
        if kind == "eq":
            x = draw(var)
            return sx.Eq(x, _var(draw(st.sampled_from([n for n in names if POOL[n] == x.sort]))))
        if kind == "equiv":
            xs = draw(st.lists(var, max_size=3))
            ys = [_var(draw(st.sampled_from([n for n in names if POOL[n] == x.sort]))) for x in xs]
            return sx.Equiv(tuple(xs), tuple(ys))
        if kind == "indep":
            vec = st.lists(var, max_size=2).map(tuple)
            return sx.Indep(draw(vec), draw(vec), draw(vec))
        rel = draw(st.sampled_from(sorted(RELATIONS)))
        args = [_var(draw(st.sampled_from([n for n in names if POOL[n] == s]))) for s in RELATIONS[rel]]
        return sx.Rel(rel, tuple(args))
    kind = draw(st.sampled_from(["not", "and", "or", "implies", "exists", "forall"]))
    if kind == "not":
        return sx.Not(draw(formulas(depth - 1, relations)))
    if kind in ("exists", "forall"):
        cls = sx.Exists if kind == "exists" else sx.Forall
        return cls(draw(var), draw(formulas(depth - 1, relations)))
    cls = {"and": sx.And, "or": sx.Or, "implies": sx.Implies}[kind]
    return cls(draw(formulas(depth - 1, relations)), draw(formulas(depth - 1, relations)))
