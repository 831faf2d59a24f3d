"""Name tuples over finite sets of names and reversed injections.

An object is a world of names ``0..n-1`` (possibly empty).  A map ``X -> Y``
is an injection of ``Y`` into ``X``; composition is reversed composition of
injections.  An element of the sort of arity ``k`` at ``X`` is a ``k``-tuple
of names from ``X``, and restriction renames along the injection.

A square is independent when its injections form a pullback (two images in
the apex world meet exactly in the image of the base); it is an independent
pullback when the images also cover the apex, i.e. the apex is a pushout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .category import FiniteCategory
from .generic import ModelCategory
from .multiteam import SupportTriple
from .signature import NameSort, Signature
from .syntax import (
    And,
    Eq,
    Equiv,
    Exists,
    Formula,
    Implies,
    Indep,
    Not,
    Or,
    Rel,
    SortError,
    free_vars,
)
from .teams import ResourceExceeded


@dataclass(frozen=True)
class IopMap:
    """A map ``dom -> cod``: the injection ``cod -> dom`` given by ``emb``."""

    dom: int
    cod: int
    emb: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "emb", tuple(self.emb))
        if len(self.emb) != self.cod:
            raise ValueError(f"an injection out of {self.cod} names needs {self.cod} entries")
        if len(set(self.emb)) != len(self.emb):
            raise ValueError(f"{list(self.emb)} is not injective")
        if any(not 0 <= e < self.dom for e in self.emb):
            raise ValueError(f"{list(self.emb)} leaves the world of size {self.dom}")

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.emb)

    def to_json(self) -> dict:
        return {"dom": self.dom, "cod": self.cod, "injection": list(self.emb)}


def iop_compose(f: IopMap, g: IopMap) -> IopMap:
    """``g . f``: the injection ``cod g -> dom f`` is ``f.emb . g.emb``."""
    if f.cod != g.dom:
        raise ValueError("maps do not compose")
    return IopMap(f.dom, g.cod, tuple(f.emb[e] for e in g.emb))


def iop_identity(n: int) -> IopMap:
    return IopMap(n, n, tuple(range(n)))


_INJ: dict[tuple[int, int], list[IopMap]] = {}


def iop_hom(x: int, y: int) -> list[IopMap]:
    key = (x, y)
    if key not in _INJ:
        _INJ[key] = [IopMap(x, y, e) for e in itertools.permutations(range(x), y)]
    return _INJ[key]


def iop_is_independent(p: IopMap, q: IopMap, r: IopMap, s: IopMap) -> bool:
    return p.image & q.image == iop_compose(p, r).image


def iop_is_independent_pullback(p: IopMap, q: IopMap, r: IopMap, s: IopMap) -> bool:
    return iop_is_independent(p, q, r, s) and (p.image | q.image) == frozenset(range(p.dom))


def iop_independent_pullback(r: IopMap, s: IopMap) -> tuple[IopMap, IopMap]:
    """Pushout of the span of injections ``Y <- W -> Z``."""
    if r.cod != s.cod:
        raise ValueError("cospan legs have different codomains")
    y, z = r.dom, s.dom
    glue = {s.emb[w]: r.emb[w] for w in range(r.cod)}
    extra = [c for c in range(z) if c not in glue]
    where = {c: y + i for i, c in enumerate(extra)}
    size = y + len(extra)
    p = IopMap(size, y, tuple(range(y)))
    q = IopMap(size, z, tuple(glue.get(c, where.get(c)) for c in range(z)))
    return p, q


def iop_pairing(p: IopMap, q: IopMap) -> tuple[int, IopMap, IopMap, IopMap]:
    """The union of the two images: ``(P, e, p2, q2)`` with ``p == p2 . e``."""
    if p.dom != q.dom:
        raise ValueError("pairing needs a span")
    names = sorted(p.image | q.image)
    index = {n: i for i, n in enumerate(names)}
    e = IopMap(p.dom, len(names), tuple(names))
    p2 = IopMap(len(names), p.cod, tuple(index[v] for v in p.emb))
    q2 = IopMap(len(names), q.cod, tuple(index[v] for v in q.emb))
    return len(names), e, p2, q2


class IopCategory(FiniteCategory):
    """Finite name sets with reversed injections."""

    name = "Iop"

    def objects(self, bound: int) -> list[int]:
        return list(range(bound + 1))

    def hom(self, x, y):
        return iop_hom(x, y)

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def compose(self, f, g):
        return iop_compose(f, g)

    def identity(self, x):
        return iop_identity(x)

    def size(self, x) -> int:
        return x

    def is_independent(self, p, q, r, s) -> bool:
        return iop_is_independent(p, q, r, s)

    def is_independent_pullback(self, p, q, r, s) -> bool:
        return iop_is_independent_pullback(p, q, r, s)

    def independent_pullback(self, r, s):
        return iop_independent_pullback(r, s)

    def isomorphisms(self, x, y):
        return iop_hom(x, y) if x == y else []

    def describe(self, f):
        return f.to_json()


# ------------------------------------------------------------ name tuples


@dataclass(frozen=True)
class NameTuple:
    world: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.world < 0 or any(not 0 <= e < self.world for e in self.entries):
            raise ValueError(f"{list(self.entries)} is not a tuple of names below {self.world}")

    @property
    def arity(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {"world": self.world, "entries": list(self.entries)}

    @classmethod
    def from_json(cls, data: dict) -> "NameTuple":
        return cls(int(data["world"]), tuple(data["entries"]))


def restrict_tuple(t: NameTuple, i: tuple[int, ...], world: int | None = None) -> NameTuple:
    """Rename along an injection ``i`` of the tuple's world into a larger one."""
    if len(i) != t.world or len(set(i)) != len(i):
        raise ValueError(f"{list(i)} is not an injection out of a world of size {t.world}")
    size = world if world is not None else (max(i) + 1 if i else 0)
    return NameTuple(size, tuple(i[e] for e in t.entries))


def name_support(t: NameTuple) -> frozenset[int]:
    return frozenset(t.entries)


def concat(ts) -> NameTuple:
    ts = list(ts)
    world = ts[0].world if ts else 0
    return NameTuple(world, tuple(e for t in ts for e in t.entries))


def pattern(entries) -> tuple[int, ...]:
    first: dict[int, int] = {}
    return tuple(first.setdefault(e, len(first)) for e in entries)


def orbit_equiv(t: NameTuple, u: NameTuple) -> bool:
    if t.arity != u.arity:
        raise ValueError("orbit equivalence compares tuples of one arity")
    return pattern(t.entries) == pattern(u.entries)


def cond_indep_tuples(x: NameTuple, y: NameTuple, z: NameTuple) -> bool:
    return name_support(x) & name_support(y) <= name_support(z)


def all_tuples(world: int, arity: int) -> Iterator[NameTuple]:
    for entries in itertools.product(range(world), repeat=arity):
        yield NameTuple(world, entries)


class SchanuelModel(ModelCategory):
    name = "Iop"

    def __init__(self) -> None:
        self.cat = IopCategory()

    def obj(self, x: NameTuple) -> int:
        return x.world

    def restrict(self, x: NameTuple, f: IopMap) -> NameTuple:
        if f.cod != x.world:
            raise ValueError("restriction along a map into another world")
        return NameTuple(f.dom, tuple(f.emb[e] for e in x.entries))

    def support(self, x: NameTuple) -> SupportTriple:
        names = sorted(name_support(x))
        index = {n: i for i, n in enumerate(names)}
        return SupportTriple(len(names), IopMap(x.world, len(names), tuple(names)), NameTuple(len(names), tuple(index[e] for e in x.entries)))

    def pairing(self, p, q):
        return iop_pairing(p, q)

    def pair(self, x, y):
        return concat([x, y])

    def descend_map(self, f: IopMap, e: IopMap):
        # f.emb must land inside the image of e.emb
        where = {v: i for i, v in enumerate(e.emb)}
        if not all(v in where for v in f.emb):
            return None
        return IopMap(e.cod, f.cod, tuple(where[v] for v in f.emb))

    def descend(self, x: NameTuple, f: IopMap):
        where = {v: i for i, v in enumerate(f.emb)}
        if not all(v in where for v in x.entries):
            return None
        return NameTuple(f.cod, tuple(where[v] for v in x.entries))

    def spans(self, X: int):
        # the first leg is the standard inclusion; the second covers the new names
        for extra in range(X + 1):
            W = X + extra
            fresh = set(range(X, W))
            for emb in itertools.permutations(range(W), X):
                if fresh <= set(emb):
                    yield W, IopMap(W, X, tuple(range(X))), IopMap(W, X, emb)

    def maps_from(self, X: int):
        # up to isomorphism of the codomain: one map per subset of X
        for k in range(X + 1):
            for names in itertools.combinations(range(X), k):
                yield IopMap(X, k, names)


# ------------------------------------------------------------ forcing


def _carrier(sig: Signature, sort: str) -> int:
    c = sig.sorts.get(sort)
    if not isinstance(c, NameSort):
        raise SortError(f"sort {sort} is not a name sort", None)
    return c.arity


def quantifier_choices(world: int, used: frozenset[int], arity: int, reduce: bool = True) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Witness tuples for a quantifier: ``(new world size, entries)``.

    The new world adds ``j <= arity`` fresh names and the tuple uses each of
    them.  With ``reduce``, names outside ``used`` are interchangeable, so
    the unused old names and the fresh names each appear in first-use order.
    """
    for j in range(arity + 1):
        size = world + j
        for entries in itertools.product(range(size), repeat=arity):
            fresh = [e for e in entries if e >= world]
            if set(fresh) != set(range(world, size)):
                continue
            if reduce:
                if _first_use(fresh) != sorted(set(fresh)):
                    continue
                idle = [e for e in entries if e < world and e not in used]
                spare = sorted(set(range(world)) - used)
                if _first_use(idle) != spare[: len(set(idle))]:
                    continue
            yield size, entries


def _first_use(xs) -> list[int]:
    out: list[int] = []
    for x in xs:
        if x not in out:
            out.append(x)
    return out


class _Nominal:
    def __init__(self, sig: Signature, reduce: bool, budget: int | None):
        self.sig = sig
        self.reduce = reduce
        self.budget = budget
        self.visited = 0

    def joint(self, rho, world, vs) -> NameTuple:
        try:
            return NameTuple(world, tuple(e for v in vs for e in rho[v.name].entries))
        except KeyError as exc:
            raise SortError(f"unbound variable {exc.args[0]}", exc.args[0]) from None

    def force(self, f: Formula, world: int, rho: dict) -> bool:
        if isinstance(f, Eq):
            return self.joint(rho, world, [f.x]) == self.joint(rho, world, [f.y])
        if isinstance(f, Equiv):
            return orbit_equiv(self.joint(rho, world, f.xs), self.joint(rho, world, f.ys))
        if isinstance(f, Indep):
            return cond_indep_tuples(self.joint(rho, world, f.xs), self.joint(rho, world, f.ys), self.joint(rho, world, f.zs))
        if isinstance(f, Rel):
            raise SortError(f"relation {f.name} has no interpretation in the nominal model", None)
        if isinstance(f, Not):
            return not self.force(f.body, world, rho)
        if isinstance(f, And):
            return self.force(f.left, world, rho) and self.force(f.right, world, rho)
        if isinstance(f, Or):
            return self.force(f.left, world, rho) or self.force(f.right, world, rho)
        if isinstance(f, Implies):
            return (not self.force(f.left, world, rho)) or self.force(f.right, world, rho)
        want = isinstance(f, Exists)
        arity = _carrier(self.sig, f.var.sort)
        used = frozenset(e for t in rho.values() for e in t.entries)
        for size, entries in quantifier_choices(world, used, arity, self.reduce):
            self.visited += 1
            if self.budget is not None and self.visited > self.budget:
                raise ResourceExceeded(f"nominal evaluation visited more than {self.budget} witnesses")
            ext = {n: NameTuple(size, t.entries) for n, t in rho.items()}
            ext[f.var.name] = NameTuple(size, entries)
            if self.force(f.body, size, ext) == want:
                return want
        return not want


def eval_nominal(
    f: Formula,
    world: int,
    rho: Mapping[str, NameTuple] | None = None,
    sig: Signature | None = None,
    reduce: bool = True,
    budget: int | None = None,
) -> bool:
    """Forcing at a world of names under an assignment of name tuples."""
    rho = dict(rho or {})
    sig = sig if sig is not None else Signature({"N": NameSort("N", 1)})
    for v in free_vars(f):
        if v.name not in rho:
            raise SortError(f"unbound variable {v.name}", v.name)
        if rho[v.name].arity != _carrier(sig, v.sort):
            raise SortError(f"{v.name} needs a tuple of arity {_carrier(sig, v.sort)}", v.name)
    for n, t in rho.items():
        if t.world != world:
            raise SortError(f"{n} lives in a world of size {t.world}, not {world}", n)
    return _Nominal(sig, reduce, budget).force(f, world, rho)


def valid_nominal(f: Formula, max_world: int, sig: Signature | None = None, reduce: bool = True) -> tuple[bool, int | None]:
    """Is the sentence ``f`` forced at every world up to ``max_world``?  Returns the first failing world."""
    for w in range(max_world + 1):
        if not eval_nominal(f, w, {}, sig, reduce):
            return False, w
    return True, None


def nominal_signature(arity: int = 1, name: str = "N") -> Signature:
    return Signature({name: NameSort(name, arity)})
