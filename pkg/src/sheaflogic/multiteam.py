"""Nondeterministic variables: the presheaf NV(A) on finite sets and surjections.

An element of NV(A) at a sample set Omega is just a function Omega -> A.
Restriction along f: Omega' -> Omega is precomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from . import fincat
from .fincat import FinSet, FinSurjection, MapError


class NotInvariant(ValueError):
    """Raised by ``descend`` when a variable is not constant on the fibres."""


@dataclass(frozen=True)
class SortValueSet:
    name: str
    values: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"sort {self.name} has repeated values")

    @property
    def size(self) -> int:
        return len(self.values)

    def index(self, value) -> int:
        return self.values.index(value)

    @classmethod
    def of_size(cls, name: str, n: int) -> "SortValueSet":
        return cls(name, tuple(range(n)))


@dataclass(frozen=True)
class NondetVar:
    sample: FinSet
    sort: SortValueSet
    values: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.sample.size:
            raise MapError(f"{len(self.values)} values for a sample of size {self.sample.size}")
        allowed = set(self.sort.values)
        for v in self.values:
            if v not in allowed:
                raise MapError(f"value {v!r} not in sort {self.sort.name}")

    def __call__(self, omega: int):
        return self.values[omega]

    def image(self) -> frozenset:
        return frozenset(self.values)

    def to_json(self) -> dict:
        return {"sample": self.sample.size, "sort": self.sort.name, "values": list(self.values)}

    @classmethod
    def from_json(cls, data: dict, sorts: dict[str, SortValueSet]) -> "NondetVar":
        try:
            sort = sorts[data["sort"]]
            return cls(FinSet(int(data["sample"])), sort, tuple(data["values"]))
        except KeyError as exc:
            raise MapError(f"malformed nondeterministic variable {data!r}: missing {exc}") from exc


def product_sort(sorts: Sequence[SortValueSet]) -> SortValueSet:
    name = "*".join(s.name for s in sorts) or "1"
    return SortValueSet(name, tuple(itertools.product(*(s.values for s in sorts))))


def tuple_var(sample: FinSet, xs: Sequence[NondetVar]) -> NondetVar:
    """The joint variable ``omega -> (x1 omega, ..., xn omega)``."""
    for x in xs:
        if x.sample != sample:
            raise MapError("variables live on different samples")
    sort = product_sort([x.sort for x in xs])
    return NondetVar(sample, sort, tuple(zip(*(x.values for x in xs))) if xs else ((),) * sample.size)


def restrict(x: NondetVar, f: FinSurjection) -> NondetVar:
    if f.cod != x.sample:
        raise MapError(f"cannot restrict: map lands in {f.cod.size}, variable lives on {x.sample.size}")
    return NondetVar(f.dom, x.sort, tuple(x.values[j] for j in f.map))


def is_invariant(x: NondetVar, f: FinSurjection) -> bool:
    """Is ``x`` constant on every fibre of ``f``?"""
    if f.dom != x.sample:
        raise MapError("invariance needs a map out of the variable's sample")
    seen: dict[int, object] = {}
    for omega, k in enumerate(f.map):
        if seen.setdefault(k, x.values[omega]) != x.values[omega]:
            return False
    return True


def descend(x: NondetVar, f: FinSurjection) -> NondetVar:
    """The unique ``y`` on ``f.cod`` with ``restrict(y, f) == x``."""
    if not is_invariant(x, f):
        raise NotInvariant(f"{list(x.values)} is not constant on the fibres of {list(f.map)}")
    out = [None] * f.cod.size
    for omega, k in enumerate(f.map):
        out[k] = x.values[omega]
    return NondetVar(f.cod, x.sort, tuple(out))


def equiextensive(x: NondetVar, y: NondetVar) -> bool:
    if x.sort != y.sort:
        raise MapError("equiextension compares variables of one sort")
    return x.image() == y.image()


def cond_indep(x: NondetVar, y: NondetVar, z: NondetVar) -> bool:
    """Whenever ``z`` agrees at two points, some point carries the first's x and the second's y."""
    if not x.sample == y.sample == z.sample:
        raise MapError("variables live on different samples")
    triples = set(zip(x.values, y.values, z.values))
    xz = {(a, c) for a, _, c in triples}
    yz = {(b, c) for _, b, c in triples}
    for a, c in xz:
        for b, c2 in yz:
            if c == c2 and (a, b, c) not in triples:
                return False
    return True


def box_member(x: NondetVar, p: Iterable) -> bool:
    allowed = set(p)
    return all(v in allowed for v in x.values)


def diamond_member(x: NondetVar, p: Iterable) -> bool:
    allowed = set(p)
    return any(v in allowed for v in x.values)


@dataclass(frozen=True)
class SupportTriple:
    obj: object
    map: object
    elem: object


def support(x: NondetVar) -> SupportTriple:
    """Image factorisation ``x = xhat . s`` with ``xhat`` injective."""
    image, e, values = fincat.image_factorise(x.values)
    image = FinSet(image.size, labels=values)
    e = FinSurjection(x.sample, image, e.map)
    return SupportTriple(image, e, NondetVar(image, x.sort, values))


# ---------------------------------------------------------- enumeration


def all_vars(sample: FinSet | int, sort: SortValueSet) -> Iterator[NondetVar]:
    sample = sample if isinstance(sample, FinSet) else FinSet(sample)
    for values in itertools.product(sort.values, repeat=sample.size):
        yield NondetVar(sample, sort, values)


def check_subsheaf_closure(
    relation: Callable[..., bool],
    sorts: Sequence[SortValueSet],
    bound: int,
) -> tuple[bool, object]:
    """Is ``relation`` closed under restriction and reflected by it?

    For every ``f: Omega' -> Omega`` with both sizes at most ``bound`` and
    every tuple of variables on Omega, ``relation(xs) == relation(xs . f)``.
    Returns ``(ok, counterexample)``.
    """
    for n in range(1, bound + 1):
        tuples = list(itertools.product(*(list(all_vars(n, s)) for s in sorts)))
        verdict = {xs: relation(*xs) for xs in tuples}
        for m in range(n, bound + 1):
            for f in fincat.surjections(m, n):
                for xs, held in verdict.items():
                    after = relation(*(restrict(x, f) for x in xs))
                    if after != held:
                        return False, {"map": f.to_json(), "vars": [x.to_json() for x in xs], "before": held, "after": after}
    return True, None


def nv_square_is_pullback(sq: Sequence[FinSurjection], sort: SortValueSet) -> bool:
    """Does NV(A) send the square ``(p, q, r, s)`` to a pullback of sets?

    The image square has apex NV(A)(W) and legs restriction along r and s;
    it is a pullback when ``w -> (w.r, w.s)`` is a bijection onto the pairs
    ``(y, z)`` with ``y.p == z.q``.
    """
    p, q, r, s = sq
    ys = [v.values for v in all_vars(p.cod, sort)]
    zs = [v.values for v in all_vars(q.cod, sort)]
    matching = {
        (y, z)
        for y in ys
        for z in zs
        if all(y[p.map[x]] == z[q.map[x]] for x in range(p.dom.size))
    }
    images = [
        (tuple(w.values[j] for j in r.map), tuple(w.values[j] for j in s.map))
        for w in all_vars(r.cod, sort)
    ]
    return len(set(images)) == len(images) and set(images) == matching
