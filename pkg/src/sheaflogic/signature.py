"""Sorts and relation symbols bound at model-load time."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .multiteam import SortValueSet


@dataclass(frozen=True)
class NameSort:
    """Tuples of names of a fixed arity, for the nominal model."""

    name: str
    arity: int


Carrier = Union[SortValueSet, NameSort]


@dataclass(frozen=True)
class RelDecl:
    """A box or diamond predicate on a product of sorts."""

    name: str
    sorts: tuple[str, ...]
    kind: str  # "box" | "diamond"
    tuples: frozenset

    def __post_init__(self) -> None:
        if self.kind not in ("box", "diamond"):
            raise ValueError(f"relation kind must be box or diamond, got {self.kind}")


@dataclass
class Signature:
    sorts: dict[str, Carrier] = field(default_factory=dict)
    relations: dict[str, RelDecl] = field(default_factory=dict)

    def carrier(self, sort: str) -> SortValueSet:
        try:
            c = self.sorts[sort]
        except KeyError:
            raise KeyError(f"unknown sort {sort}") from None
        if not isinstance(c, SortValueSet):
            raise TypeError(f"sort {sort} is a name sort; it has no finite carrier")
        return c

    def arity(self, sort: str) -> int:
        c = self.sorts[sort]
        if not isinstance(c, NameSort):
            raise TypeError(f"sort {sort} is not a name sort")
        return c.arity

    def rel_arity(self) -> dict[str, tuple[str, ...]]:
        return {r.name: r.sorts for r in self.relations.values()}

    def merged(self, other: "Signature") -> "Signature":
        return Signature({**self.sorts, **other.sorts}, {**self.relations, **other.relations})

    def to_json(self) -> dict:
        out: dict = {}
        for name, c in self.sorts.items():
            out[name] = list(c.values) if isinstance(c, SortValueSet) else {"names": c.arity}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        sig = cls()
        for name, spec in data.items():
            if isinstance(spec, int):
                sig.sorts[name] = SortValueSet.of_size(name, spec)
            elif isinstance(spec, dict) and "names" in spec:
                sig.sorts[name] = NameSort(name, int(spec["names"]))
            else:
                sig.sorts[name] = SortValueSet(name, tuple(spec))
        return sig


def uniform(sizes: dict[str, int]) -> Signature:
    return Signature({n: SortValueSet.of_size(n, k) for n, k in sizes.items()})
