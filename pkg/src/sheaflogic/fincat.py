"""Finite sets and surjections.

A finite set of size ``n`` has carrier ``{0, ..., n-1}``.  Composition is
written ``compose(f, g)`` and means "first ``f``, then ``g``".

Commuting squares are stored as ``(p, q, r, s)`` with

    X --p--> Y
    |        |
    q        r
    v        v
    Z --s--> W

so that ``r . p == s . q``.  A square is *independent* when it is a weak
pullback in Set and an *independent pullback* when it is a pullback in Set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence


class MapError(ValueError):
    """Raised for ill-typed maps, failed compositions and non-commuting squares."""


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.size < 0:
            raise MapError(f"negative set size {self.size}")
        if self.labels is not None and len(self.labels) != self.size:
            raise MapError("label count does not match size")

    def elements(self) -> range:
        return range(self.size)

    def label(self, i: int):
        return i if self.labels is None else self.labels[i]


@dataclass(frozen=True)
class FinSurjection:
    dom: FinSet
    cod: FinSet
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "map", tuple(self.map))
        if len(self.map) != self.dom.size:
            raise MapError(f"map has length {len(self.map)}, domain has size {self.dom.size}")
        if any(not 0 <= v < self.cod.size for v in self.map):
            raise MapError("map value outside codomain")
        if len(set(self.map)) != self.cod.size:
            raise MapError(f"map {list(self.map)} is not surjective onto {self.cod.size}")
        if self.dom.size == 0 and self.cod.size != 0:
            raise MapError("empty domain")

    def __call__(self, i: int) -> int:
        return self.map[i]

    def fibre(self, j: int) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.map) if v == j)

    def to_json(self) -> dict:
        return {"dom": self.dom.size, "cod": self.cod.size, "map": list(self.map)}

    @classmethod
    def from_json(cls, data: dict) -> "FinSurjection":
        try:
            return cls(FinSet(int(data["dom"])), FinSet(int(data["cod"])), tuple(data["map"]))
        except (KeyError, TypeError) as exc:
            raise MapError(f"malformed surjection {data!r}") from exc


def surj(values: Sequence[int], cod: int | None = None) -> FinSurjection:
    """Shorthand: the surjection with the given value list."""
    values = tuple(values)
    n = (max(values) + 1 if values else 0) if cod is None else cod
    return FinSurjection(FinSet(len(values)), FinSet(n), values)


def identity(n: int | FinSet) -> FinSurjection:
    size = n.size if isinstance(n, FinSet) else n
    return FinSurjection(FinSet(size), FinSet(size), tuple(range(size)))


def compose(f: FinSurjection, g: FinSurjection) -> FinSurjection:
    """``g . f``: apply ``f`` first."""
    if f.cod != g.dom:
        raise MapError(f"cannot compose: codomain {f.cod.size} vs domain {g.dom.size}")
    return FinSurjection(f.dom, g.cod, tuple(g.map[v] for v in f.map))


def surjections(dom: int, cod: int) -> Iterator[FinSurjection]:
    """All surjections ``dom -> cod`` in lexicographic order of their value lists."""
    if cod > dom or (cod == 0) != (dom == 0):
        return
    d, c = FinSet(dom), FinSet(cod)
    for values in itertools.product(range(cod), repeat=dom):
        if len(set(values)) == cod:
            yield FinSurjection(d, c, values)


def canonical_surjections(dom: int, cod: int) -> Iterator[FinSurjection]:
    """Surjections up to automorphism of the domain: non-decreasing value lists.

    Each one corresponds to a composition of ``dom`` into ``cod`` positive parts.
    """
    if cod > dom or cod == 0:
        return
    d, c = FinSet(dom), FinSet(cod)
    for cuts in itertools.combinations(range(1, dom), cod - 1):
        bounds = (0,) + cuts + (dom,)
        values = []
        for j in range(cod):
            values.extend([j] * (bounds[j + 1] - bounds[j]))
        yield FinSurjection(d, c, tuple(values))


# ---------------------------------------------------------------- squares


@dataclass(frozen=True)
class CommutingSquare:
    p: FinSurjection
    q: FinSurjection
    r: FinSurjection
    s: FinSurjection

    def __post_init__(self) -> None:
        p, q, r, s = self.p, self.q, self.r, self.s
        if p.dom != q.dom or r.dom != p.cod or s.dom != q.cod or r.cod != s.cod:
            raise MapError("square edges do not line up")
        for x in range(p.dom.size):
            if r.map[p.map[x]] != s.map[q.map[x]]:
                raise MapError(f"square does not commute at {x}")

    @property
    def apex(self) -> FinSet:
        return self.p.dom

    @property
    def corner(self) -> FinSet:
        return self.r.cod

    def transpose(self) -> "CommutingSquare":
        return CommutingSquare(self.q, self.p, self.s, self.r)

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in "pqrs"}


def fibred_product(r: FinSurjection, s: FinSurjection) -> list[tuple[int, int]]:
    """``{(y, z) : r(y) == s(z)}`` in lexicographic order."""
    if r.cod != s.cod:
        raise MapError("cospan legs have different codomains")
    return [(y, z) for y in range(r.dom.size) for z in range(s.dom.size) if r.map[y] == s.map[z]]


def _is_weak_pullback(p: Sequence[int], q: Sequence[int], r: Sequence[int], s: Sequence[int]) -> bool:
    hit = set(zip(p, q))
    for y, ry in enumerate(r):
        for z, sz in enumerate(s):
            if ry == sz and (y, z) not in hit:
                return False
    return True


def is_independent_square(sq: CommutingSquare) -> bool:
    """Weak pullback test: every matching pair ``(y, z)`` has a common preimage."""
    return _is_weak_pullback(sq.p.map, sq.q.map, sq.r.map, sq.s.map)


def is_independent_pullback(sq: CommutingSquare) -> bool:
    """Pullback test: ``x -> (p x, q x)`` is a bijection onto the fibred product."""
    pairs = list(zip(sq.p.map, sq.q.map))
    return len(set(pairs)) == len(pairs) and is_independent_square(sq)


def coconfluence_complete(p: FinSurjection, q: FinSurjection) -> tuple[FinSet, FinSurjection, FinSurjection]:
    """Complete a cospan ``X -p-> Z <-q- Y`` to a commuting square.

    Returns ``(W, u, v)`` with ``u: W -> X``, ``v: W -> Y`` given by the fibred
    product, which is also an independent pullback.
    """
    pairs = fibred_product(p, q)
    w = FinSet(len(pairs), labels=tuple(pairs))
    u = FinSurjection(w, p.dom, tuple(a for a, _ in pairs))
    v = FinSurjection(w, q.dom, tuple(b for _, b in pairs))
    return w, u, v


def independent_pullback(r: FinSurjection, s: FinSurjection) -> CommutingSquare:
    _, u, v = coconfluence_complete(r, s)
    return CommutingSquare(u, v, r, s)


# ------------------------------------------------------- factorisations


def image_factorise(values: Sequence, dom: FinSet | None = None) -> tuple[FinSet, FinSurjection, tuple]:
    """Split a function ``dom -> V`` into a surjection and an injective value list.

    Image points are numbered in order of first occurrence.  Returns
    ``(I, e, inj)`` with ``inj[e(i)] == values[i]``.
    """
    values = tuple(values)
    if dom is not None and dom.size != len(values):
        raise MapError("value list length does not match domain")
    index: dict = {}
    for v in values:
        if v not in index:
            index[v] = len(index)
    image = FinSet(len(index))
    e = FinSurjection(FinSet(len(values)), image, tuple(index[v] for v in values))
    return image, e, tuple(index)


def pairing(p: FinSurjection, q: FinSurjection) -> tuple[FinSet, FinSurjection, FinSurjection, FinSurjection]:
    """Image factorisation of ``<p, q>: X -> Y x Z``.

    Returns ``(P, e, p2, q2)`` with ``p == compose(e, p2)`` and
    ``q == compose(e, q2)``.  ``(p2, q2)`` is jointly injective.
    """
    if p.dom != q.dom:
        raise MapError("pairing needs a span")
    image, e, pairs = image_factorise(list(zip(p.map, q.map)))
    image = FinSet(image.size, labels=pairs)
    e = FinSurjection(p.dom, image, e.map)
    p2 = FinSurjection(image, p.cod, tuple(a for a, _ in pairs))
    q2 = FinSurjection(image, q.cod, tuple(b for _, b in pairs))
    return image, e, p2, q2


def descend_map(f: FinSurjection, e: FinSurjection) -> FinSurjection | None:
    """The map ``g`` with ``compose(e, g) == f``, if ``f`` is constant on fibres of ``e``."""
    if f.dom != e.dom:
        raise MapError("descend_map needs maps with a common domain")
    out: list[int | None] = [None] * e.cod.size
    for x, k in enumerate(e.map):
        if out[k] is None:
            out[k] = f.map[x]
        elif out[k] != f.map[x]:
            return None
    return FinSurjection(e.cod, f.cod, tuple(out))  # type: ignore[arg-type]
