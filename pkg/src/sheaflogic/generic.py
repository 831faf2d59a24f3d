"""Equivalence and conditional independence from categorical structure alone.

The constructions here only talk to a ``ModelCategory``: a category with
coconfluence, independent squares, pairings, and a sheaf whose elements
have supports.  Instances exist for nondeterministic variables over finite
surjections and for name tuples over reversed injections.  Closed forms in
each model are checked against these functions in the test suite.

Conventions follow ``category``: ``compose(f, g)`` applies ``f`` first, and
``restrict(x, f)`` pulls an element at ``cod f`` back to ``dom f``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterator

from . import fincat
from .category import FiniteCategory, SurCategory
from .fincat import FinSet, FinSurjection
from .multiteam import NondetVar, SupportTriple, all_vars, restrict, support, tuple_var


class ModelError(RuntimeError):
    """The model instance broke one of its interface promises."""


class ModelCategory:
    """What the generic constructions need from a model."""

    cat: FiniteCategory
    name = "model"

    def obj(self, x) -> Any: ...

    def restrict(self, x, f) -> Any: ...

    def same(self, x, y) -> bool:
        return x == y

    def support(self, x) -> SupportTriple: ...

    def pairing(self, p, q) -> tuple:
        """Terminal factorisation of a span: ``(P, e, p2, q2)`` with ``p = p2 . e``."""
        ...

    def pair(self, x, y) -> Any:
        """The element ``(x, y)`` of the product sheaf."""
        ...

    def spans(self, X) -> Iterator[tuple]:
        """Jointly monic spans ``(W, u, v)`` into ``X``, up to isomorphism over ``X``."""
        ...

    def maps_from(self, X) -> Iterator:
        """Every map out of ``X``, up to isomorphism of the codomain."""
        ...

    def descend_map(self, f, e):
        """The ``g`` with ``compose(e, g) == f``, or ``None``."""
        ...

    def descend(self, x, f):
        """The element at ``cod f`` restricting to ``x``, or ``None``."""
        ...

    def complete(self, p, q) -> tuple:
        """Complete a cospan to a commuting square: ``(W, u, v)``."""
        u, v = self.cat.independent_pullback(p, q)
        return self.cat.dom(u), u, v

    # derived

    def compose(self, f, g):
        return self.cat.compose(f, g)

    def is_support(self, x, triple: SupportTriple) -> bool:
        """Is ``triple`` isomorphic over ``obj(x)`` to the support of ``x``?"""
        s = self.support(x)
        if not self.same(self.restrict(triple.elem, triple.map), x):
            return False
        for phi in self.cat.isomorphisms(s.obj, triple.obj):
            if self.compose(s.map, phi) == triple.map and self.same(self.restrict(triple.elem, phi), s.elem):
                return True
        return False


# ------------------------------------------------------------ equivalence


@dataclass(frozen=True)
class EquivWitness:
    apex: Any
    u: Any
    v: Any


def equiv_witness(model: ModelCategory, x, x2) -> EquivWitness | None:
    """A span ``(u, v)`` with ``x . u == x2 . v``, built from supports."""
    s, s2 = model.support(x), model.support(x2)
    for phi in model.cat.isomorphisms(s.obj, s2.obj):
        if model.same(model.restrict(s2.elem, phi), s.elem):
            w, u, v = model.complete(model.compose(s.map, phi), s2.map)
            if not model.same(model.restrict(x, u), model.restrict(x2, v)):
                raise ModelError("completed span does not identify the elements")
            return EquivWitness(w, u, v)
    return None


def atomic_equiv(model: ModelCategory, x, x2, method: str = "support") -> bool:
    """Do ``x`` and ``x2`` become equal along some span?

    ``support`` compares supports up to isomorphism and builds the span by
    completing a cospan.  ``spans`` searches the jointly monic spans; any
    witness factors through one of them by pairing and separatedness.
    """
    if model.obj(x) != model.obj(x2):
        raise ModelError("atomic equivalence compares elements at one object")
    if method == "support":
        return equiv_witness(model, x, x2) is not None
    if method == "spans":
        return any(model.same(model.restrict(x, u), model.restrict(x2, v)) for _, u, v in model.spans(model.obj(x)))
    raise ValueError(f"unknown method {method}")


# ------------------------------------------------ conditional independence


@dataclass(frozen=True)
class IndepDiagram:
    p: Any
    q: Any
    r: Any
    s: Any
    independent: bool


def canonical_diagram(model: ModelCategory, x, y, z) -> IndepDiagram:
    """The square through the pairings of the supports of x and y with that of z."""
    sz = model.support(z)
    t = sz.map
    sx, sy = model.support(x), model.support(y)
    _, ex, ax, rx = model.pairing(sx.map, t)
    _, ey, ay, ry = model.pairing(sy.map, t)
    # element conditions: x lives on the x-corner, y on the y-corner, z on the base
    if not model.same(model.restrict(model.restrict(sx.elem, ax), ex), x):
        raise ModelError("x does not factor through its pairing")
    if not model.same(model.restrict(model.restrict(sy.elem, ay), ey), y):
        raise ModelError("y does not factor through its pairing")
    if model.compose(ex, rx) != t or model.compose(ey, ry) != t:
        raise ModelError("pairing does not recover the support map of z")
    return IndepDiagram(ex, ey, rx, ry, model.cat.is_independent(ex, ey, rx, ry))


def _search_diagram(model: ModelCategory, x, y, z) -> IndepDiagram | None:
    X = model.obj(x)
    t = model.support(z).map
    for p in model.maps_from(X):
        if model.descend(x, p) is None:
            continue
        r = model.descend_map(t, p)
        if r is None:
            continue
        for q in model.maps_from(X):
            if model.descend(y, q) is None:
                continue
            s = model.descend_map(t, q)
            if s is None:
                continue
            if model.cat.is_independent(p, q, r, s):
                return IndepDiagram(p, q, r, s, True)
    return None


def atomic_cond_indep(model: ModelCategory, x, y, z, method: str = "canonical") -> bool:
    """Is there an independent square carrying x and y over the support of z?

    ``canonical`` tests one square, built from pairings.  ``search`` tries
    every square whose corners the elements descend to.
    """
    if not model.obj(x) == model.obj(y) == model.obj(z):
        raise ModelError("conditional independence needs elements at one object")
    if method == "canonical":
        return canonical_diagram(model, x, y, z).independent
    if method == "search":
        return _search_diagram(model, x, y, z) is not None
    raise ValueError(f"unknown method {method}")


# ------------------------------------------------------------ constructions


def independent_copy(model: ModelCategory, x, w) -> tuple[Any, Any, Any]:
    """Pull the support map of ``w`` back along itself; carry ``x`` over the second leg.

    Returns ``(Y, p, y)`` with ``p: Y -> X``.  The new element ``y`` has the
    same joint behaviour with ``w . p`` as ``x . p`` has, and is independent
    of everything at ``X`` given ``w . p``.
    """
    s = model.support(w).map
    p, p2 = model.cat.independent_pullback(s, s)
    return model.cat.dom(p), p, model.restrict(x, p2)


def support_of_product(model: ModelCategory, x, y) -> SupportTriple:
    sx, sy = model.support(x), model.support(y)
    P, e, p2, q2 = model.pairing(sx.map, sy.map)
    elem = model.pair(model.restrict(sx.elem, p2), model.restrict(sy.elem, q2))
    return SupportTriple(P, e, elem)


class Memo(ModelCategory):
    """Caches supports, pairings and restrictions of another model."""

    def __init__(self, inner: ModelCategory) -> None:
        self.inner = inner
        self.cat = inner.cat
        self.name = inner.name
        self._support: dict = {}
        self._pairing: dict = {}
        self._restrict: dict = {}

    def __getattr__(self, attr):
        return getattr(self.inner, attr)

    def obj(self, x):
        return self.inner.obj(x)

    def same(self, x, y) -> bool:
        return self.inner.same(x, y)

    def support(self, x):
        got = self._support.get(x)
        if got is None:
            got = self._support[x] = self.inner.support(x)
        return got

    def pairing(self, p, q):
        key = (p, q)
        got = self._pairing.get(key)
        if got is None:
            got = self._pairing[key] = self.inner.pairing(p, q)
        return got

    def restrict(self, x, f):
        key = (x, f)
        got = self._restrict.get(key)
        if got is None:
            got = self._restrict[key] = self.inner.restrict(x, f)
        return got

    def pair(self, x, y):
        return self.inner.pair(x, y)

    def spans(self, X):
        return self.inner.spans(X)

    def maps_from(self, X):
        return self.inner.maps_from(X)

    def descend_map(self, f, e):
        return self.inner.descend_map(f, e)

    def descend(self, x, f):
        return self.inner.descend(x, f)


# ------------------------------------------------------------ Sur / NV


class SurNVModel(ModelCategory):
    """Nondeterministic variables over finite sets and surjections."""

    name = "Sur"

    def __init__(self) -> None:
        self.cat = SurCategory()

    def obj(self, x: NondetVar) -> FinSet:
        return x.sample

    def restrict(self, x: NondetVar, f: FinSurjection) -> NondetVar:
        return restrict(x, f)

    def same(self, x, y) -> bool:
        return x.sample == y.sample and x.values == y.values

    def support(self, x: NondetVar) -> SupportTriple:
        return support(x)

    def pairing(self, p, q):
        return fincat.pairing(p, q)

    def pair(self, x, y):
        return tuple_var(x.sample, [x, y])

    def descend_map(self, f, e):
        return fincat.descend_map(f, e)

    def descend(self, x: NondetVar, f: FinSurjection):
        out: dict[int, Any] = {}
        for omega, k in enumerate(f.map):
            if out.setdefault(k, x.values[omega]) != x.values[omega]:
                return None
        return NondetVar(f.cod, x.sort, tuple(out[k] for k in range(f.cod.size)))

    def spans(self, X: FinSet):
        cells = [(a, b) for a in range(X.size) for b in range(X.size)]
        for k in range(X.size, len(cells) + 1):
            for rel in itertools.combinations(cells, k):
                if len({a for a, _ in rel}) == X.size and len({b for _, b in rel}) == X.size:
                    W = FinSet(k)
                    yield W, FinSurjection(W, X, tuple(a for a, _ in rel)), FinSurjection(W, X, tuple(b for _, b in rel))

    def maps_from(self, X: FinSet):
        # quotients of X: one surjection per partition, blocks numbered by first element
        for n in range(1, X.size + 1):
            for f in fincat.surjections(X.size, n):
                first = [f.map.index(j) for j in range(n)]
                if first == sorted(first):
                    yield f

    def elements(self, X: FinSet, sort):
        return all_vars(X, sort)


def nv_tuple(xs) -> NondetVar:
    """Join a nonempty list of variables on one sample into a single variable."""
    return tuple_var(xs[0].sample, list(xs))
