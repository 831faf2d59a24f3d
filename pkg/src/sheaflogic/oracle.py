"""Forcing over explicit sample sets.

This is the slow reference semantics.  An assignment binds variables to
nondeterministic variables on one sample set; a quantifier ranges over
surjections ``f: Y -> Omega`` together with a value ``x: Y -> A``, and the
body is forced at ``Y`` under the restricted assignment.

Two witness enumerations are offered:

``canonical``
    For every choice of a nonempty set of values at each sample point, the
    witness ``Y = {(omega, a)}`` with its first projection.  Any other
    witness ``(Y, f, x)`` factors through the image of ``(f, x)`` by a
    surjection, so by the sheaf property nothing is lost.

``literal``
    Every non-decreasing surjection ``Y -> Omega`` with ``|Y|`` up to a
    bound, and every ``x`` up to permutations inside a fibre.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .fincat import FinSet, FinSurjection, canonical_surjections, identity
from .multiteam import NondetVar, SortValueSet, box_member, cond_indep, diamond_member, equiextensive, restrict, tuple_var
from .signature import Signature
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
from .teams import ResourceExceeded, _subsets

MODES = ("canonical", "literal")


@dataclass
class Assignment:
    sample: int
    bindings: dict[str, NondetVar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.sample < 1:
            raise SortError("a sample set is nonempty")
        for name, x in self.bindings.items():
            if x.sample.size != self.sample:
                raise SortError(f"{name} lives on a sample of size {x.sample.size}, not {self.sample}", name)

    def restrict(self, f: FinSurjection) -> "Assignment":
        return Assignment(f.dom.size, {n: restrict(x, f) for n, x in self.bindings.items()})

    def only(self, names) -> "Assignment":
        return Assignment(self.sample, {n: x for n, x in self.bindings.items() if n in names})

    def to_json(self) -> dict:
        return {
            "omega": self.sample,
            "rho": {n: {"sort": x.sort.name, "values": list(x.values)} for n, x in sorted(self.bindings.items())},
        }

    @classmethod
    def from_json(cls, data: dict, sig: Signature) -> "Assignment":
        try:
            n = int(data["omega"])
            sample = FinSet(n)
            rho = {}
            for name, b in data["rho"].items():
                sort = sig.carrier(b["sort"])
                rho[name] = NondetVar(sample, sort, tuple(b["values"]))
        except (KeyError, TypeError) as exc:
            raise SortError(f"malformed assignment: {exc}") from exc
        return cls(n, rho)


def witness_bound(sample: int, sort_size: int) -> int:
    """Largest witness sample the literal enumeration needs to visit."""
    return sample * sort_size


def canonical_witnesses(sample: int, sort: SortValueSet) -> Iterator[tuple[FinSurjection, tuple]]:
    choices = _subsets(sort.values)
    for pick in itertools.product(choices, repeat=sample):
        f = [w for w, chosen in enumerate(pick) for _ in chosen]
        x = tuple(a for chosen in pick for a in chosen)
        yield FinSurjection(FinSet(len(f)), FinSet(sample), tuple(f)), x


def literal_witnesses(sample: int, sort: SortValueSet, bound: int) -> Iterator[tuple[FinSurjection, tuple]]:
    for m in range(sample, bound + 1):
        for f in canonical_surjections(m, sample):
            sizes = [len(f.fibre(j)) for j in range(sample)]
            per_fibre = [list(itertools.combinations_with_replacement(sort.values, k)) for k in sizes]
            for parts in itertools.product(*per_fibre):
                yield f, tuple(a for part in parts for a in part)


class _Forcer:
    def __init__(self, sig: Signature, mode: str, bound_factor: int, budget: int | None):
        if mode not in MODES:
            raise ValueError(f"unknown oracle mode {mode}")
        self.sig = sig
        self.mode = mode
        self.bound_factor = bound_factor
        self.budget = budget
        self.visited = 0

    def joint(self, rho: Assignment, vs) -> NondetVar:
        try:
            return tuple_var(FinSet(rho.sample), [rho.bindings[v.name] for v in vs])
        except KeyError as exc:
            raise SortError(f"unbound variable {exc.args[0]}", exc.args[0]) from None

    def atom(self, a, rho: Assignment) -> bool:
        if isinstance(a, Eq):
            return self.joint(rho, [a.x]).values == self.joint(rho, [a.y]).values
        if isinstance(a, Equiv):
            return equiextensive(self.joint(rho, a.xs), self.joint(rho, a.ys))
        if isinstance(a, Indep):
            return cond_indep(self.joint(rho, a.xs), self.joint(rho, a.ys), self.joint(rho, a.zs))
        if isinstance(a, Rel):
            decl = self.sig.relations[a.name]
            x = self.joint(rho, a.args)
            return box_member(x, decl.tuples) if decl.kind == "box" else diamond_member(x, decl.tuples)
        raise TypeError(a)

    def witnesses(self, rho: Assignment, sort: SortValueSet):
        if self.mode == "canonical":
            return canonical_witnesses(rho.sample, sort)
        return literal_witnesses(rho.sample, sort, self.bound_factor * witness_bound(rho.sample, sort.size))

    def force(self, f: Formula, rho: Assignment) -> bool:
        if isinstance(f, (Eq, Equiv, Indep, Rel)):
            return self.atom(f, rho)
        if isinstance(f, Not):
            return not self.force(f.body, rho)
        if isinstance(f, And):
            return self.force(f.left, rho) and self.force(f.right, rho)
        if isinstance(f, Or):
            return self.force(f.left, rho) or self.force(f.right, rho)
        if isinstance(f, Implies):
            return (not self.force(f.left, rho)) or self.force(f.right, rho)
        want = isinstance(f, Exists)
        sort = self.sig.carrier(f.var.sort)
        for g, x in self.witnesses(rho, sort):
            self.visited += 1
            if self.budget is not None and self.visited > self.budget:
                raise ResourceExceeded(f"oracle visited more than {self.budget} witnesses")
            ext = rho.restrict(g)
            ext.bindings[f.var.name] = NondetVar(g.dom, sort, x)
            if self.force(f.body, ext) == want:
                return want
        return not want


def force(
    rho: Assignment,
    f: Formula,
    sig: Signature,
    mode: str = "canonical",
    bound_factor: int = 1,
    budget: int | None = None,
) -> bool:
    """Does the sample set of ``rho`` force ``f``?"""
    for v in free_vars(f):
        if v.name not in rho.bindings:
            raise SortError(f"unbound variable {v.name}", v.name)
        if rho.bindings[v.name].sort.name != v.sort:
            raise SortError(f"{v.name} is bound to sort {rho.bindings[v.name].sort.name}, used as {v.sort}", v.name)
    return _Forcer(sig, mode, bound_factor, budget).force(f, rho)


# ------------------------------------------------------------ metamorphic


def restriction_invariant(rho: Assignment, f: Formula, sig: Signature, c: FinSurjection, **kw) -> bool:
    """Forcing at Omega agrees with forcing at Omega' after restricting along ``c``."""
    return force(rho, f, sig, **kw) == force(rho.restrict(c), f, sig, **kw)


def locality_invariant(rho: Assignment, f: Formula, sig: Signature, **kw) -> bool:
    names = {v.name for v in free_vars(f)}
    return force(rho, f, sig, **kw) == force(rho.only(names), f, sig, **kw)


def permutation_invariant(rho: Assignment, f: Formula, sig: Signature, perm: tuple[int, ...], **kw) -> bool:
    c = FinSurjection(FinSet(rho.sample), FinSet(rho.sample), tuple(perm))
    return restriction_invariant(rho, f, sig, c, **kw)


def metamorphic_check(rho: Assignment, f: Formula, sig: Signature, c: FinSurjection | None = None, **kw) -> bool:
    """Restriction along ``c`` (identity by default) and dropping unused bindings leave forcing unchanged."""
    c = c if c is not None else identity(rho.sample)
    return restriction_invariant(rho, f, sig, c, **kw) and locality_invariant(rho, f, sig, **kw)


def random_surjection(rng: random.Random, cod: int, max_dom: int) -> FinSurjection:
    m = rng.randint(cod, max(cod, max_dom))
    values = list(range(cod)) + [rng.randrange(cod) for _ in range(m - cod)]
    rng.shuffle(values)
    return FinSurjection(FinSet(m), FinSet(cod), tuple(values))
