"""Axiom schemas for equivalence and conditional independence.

Schema ids:

    equiv:A  reflexivity        x ~ x
    equiv:B  symmetry           x ~ y -> y ~ x
    equiv:C  transitivity       x ~ y and y ~ z -> x ~ z
    equiv:D  permutation        x ~ y -> pi(x) ~ pi(y)
    equiv:E  projection         x,u ~ y,v -> x ~ y
    equiv:F  invariance         x ~ y and Phi(x) -> Phi(y)
    equiv:G  transfer           x ~ x' -> exists y'. x,y ~ x',y'
    indep:P  permutation        x _|_ y | z -> pi(x) _|_ pi'(y) | pi''(z)
    indep:A  x _|_ y | y
    indep:B  symmetry
    indep:W  x _|_ y,z | w -> x _|_ y | w
    indep:C  x _|_ y,z | w -> x _|_ y | z,w
    indep:D  x _|_ y | z,w and x _|_ z | w -> x _|_ y,z | w
    indep:Z  exists y. y,w ~ x,w and y _|_ z | w
    existence-preservation
             (exists y. Phi(x,y,w)) -> forall z. (x _|_ z | w -> exists y. (x,y _|_ z | w and Phi(x,y,w)))

Vectors are written x1..xn.  Every instance is closed by universal
quantification over its free variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .parser import parse
from .syntax import (
    And,
    Equiv,
    Exists,
    Formula,
    Implies,
    Indep,
    Var,
    exists,
    forall,
    free_vars_ordered,
    substitute,
)

EQUIV_SCHEMAS = ("equiv:A", "equiv:B", "equiv:C", "equiv:D", "equiv:E", "equiv:F", "equiv:G")
INDEP_SCHEMAS = ("indep:P", "indep:A", "indep:B", "indep:W", "indep:C", "indep:D", "indep:Z")
EXISTENCE = "existence-preservation"
SCHEMAS = EQUIV_SCHEMAS + INDEP_SCHEMAS + (EXISTENCE,)
NEEDS_PERMUTATIONS = {"equiv:D": 1, "indep:P": 3}
NEEDS_PHI = {"equiv:F", EXISTENCE}


class SchemaError(ValueError):
    pass


def vector(name: str, n: int, sort: str, prime: bool = False) -> tuple[Var, ...]:
    mark = "'" if prime else ""
    return tuple(Var(f"{name}{i + 1}{mark}", sort) for i in range(n))


def _apply(perm: Sequence[int], vs: Sequence[Var]) -> tuple[Var, ...]:
    if sorted(perm) != list(range(len(vs))):
        raise SchemaError(f"{list(perm)} is not a permutation of {len(vs)} positions")
    return tuple(vs[i] for i in perm)


@dataclass(frozen=True)
class BatteryEntry:
    name: str
    arity: int
    text: str  # over frame variables a, b, c

    def formula(self, sort: str) -> tuple[Formula, tuple[Var, ...]]:
        frame = tuple(Var(n, sort) for n in "abc"[: self.arity])
        f = parse(self.text.replace(":S", f":{sort}"), context={v.name: sort for v in frame})
        return f, frame


BATTERY = (
    BatteryEntry("constant", 1, "indep(a ; a |)"),
    BatteryEntry("equal", 2, "eq(a, b)"),
    BatteryEntry("distinct", 2, "not eq(a, b)"),
    BatteryEntry("equiextensive", 2, "equiv(a ; b)"),
    BatteryEntry("independent", 2, "indep(a ; b |)"),
    BatteryEntry("cond-independent", 3, "indep(a ; b | c)"),
    BatteryEntry("indep-or-equal", 3, "indep(a ; b | c) or eq(a, c)"),
    BatteryEntry("swap-symmetric", 2, "equiv(a, b ; b, a)"),
    BatteryEntry("dependent-copy", 2, "not indep(a ; b |) and equiv(a ; b)"),
    BatteryEntry("has-independent-copy", 1, "exists v:S. indep(v ; a |) and equiv(v ; a)"),
    BatteryEntry("equal-implies-indep", 2, "forall v:S. eq(a, v) -> indep(v ; b |)"),
    BatteryEntry("splits", 3, "exists v:S. equiv(a, v ; b, c)"),
)


def battery(sort: str = "A") -> list[tuple[str, Formula, tuple[Var, ...]]]:
    return [(e.name, *e.formula(sort)) for e in BATTERY]


def _close(f: Formula) -> Formula:
    return forall(free_vars_ordered(f), f)


def instantiate_schema(
    schema_id: str,
    length: int = 1,
    sort: str = "A",
    perms: Sequence[Sequence[int]] | None = None,
    phi: tuple[Formula, Sequence[Var]] | None = None,
    split: tuple[int, int, int] | None = None,
    z_length: int = 1,
) -> Formula:
    """A closed instance of a schema.

    ``length`` is the common length of the schema's vectors.  ``perms`` gives
    the permutations for ``equiv:D`` (one) and ``indep:P`` (three).  ``phi`` is
    a formula with its frame for ``equiv:F`` and existence preservation; for
    the latter ``split`` divides the frame into the x, y and w parts.
    """
    if length < 0:
        raise SchemaError("vector lengths must be nonnegative")
    if schema_id not in SCHEMAS:
        raise SchemaError(f"unknown schema {schema_id}")
    n = length
    x, y, z, w = (vector(c, n, sort) for c in "xyzw")
    if schema_id in NEEDS_PERMUTATIONS:
        want = NEEDS_PERMUTATIONS[schema_id]
        perms = [tuple(range(n))] * want if perms is None else [tuple(p) for p in perms]
        if len(perms) != want:
            raise SchemaError(f"{schema_id} needs {want} permutation(s)")
    if schema_id in NEEDS_PHI and phi is None:
        raise SchemaError(f"{schema_id} needs a formula Phi")

    if schema_id == "equiv:A":
        return _close(Equiv(x, x))
    if schema_id == "equiv:B":
        return _close(Implies(Equiv(x, y), Equiv(y, x)))
    if schema_id == "equiv:C":
        return _close(Implies(And(Equiv(x, y), Equiv(y, z)), Equiv(x, z)))
    if schema_id == "equiv:D":
        return _close(Implies(Equiv(x, y), Equiv(_apply(perms[0], x), _apply(perms[0], y))))
    if schema_id == "equiv:E":
        u, v = Var("u", sort), Var("v", sort)
        return _close(Implies(Equiv(x + (u,), y + (v,)), Equiv(x, y)))
    if schema_id == "equiv:F":
        f, frame = phi
        if len(frame) != n:
            raise SchemaError("Phi's frame must have the schema's vector length")
        return _close(Implies(And(Equiv(x, y), substitute(f, frame, x)), substitute(f, frame, y)))
    if schema_id == "equiv:G":
        xp = vector("x", n, sort, prime=True)
        yv, yp = Var("y", sort), Var("y'", sort)
        body = Implies(Equiv(x, xp), Exists(yp, Equiv(x + (yv,), xp + (yp,))))
        return forall(x + xp + (yv,), body)
    if schema_id == "indep:P":
        p1, p2, p3 = perms
        return _close(Implies(Indep(x, y, z), Indep(_apply(p1, x), _apply(p2, y), _apply(p3, z))))
    if schema_id == "indep:A":
        return _close(Indep(x, y, y))
    if schema_id == "indep:B":
        return _close(Implies(Indep(x, y, z), Indep(y, x, z)))
    if schema_id == "indep:W":
        return _close(Implies(Indep(x, y + z, w), Indep(x, y, w)))
    if schema_id == "indep:C":
        return _close(Implies(Indep(x, y + z, w), Indep(x, y, z + w)))
    if schema_id == "indep:D":
        return _close(Implies(And(Indep(x, y, z + w), Indep(x, z, w)), Indep(x, y + z, w)))
    if schema_id == "indep:Z":
        body = exists(y, And(Equiv(y + w, x + w), Indep(y, z, w)))
        return forall(x + z + w, body)
    # existence preservation
    f, frame = phi
    a, b, c = split if split is not None else (0, len(frame), 0)
    if a + b + c != len(frame) or min(a, b, c) < 0:
        raise SchemaError("split must divide Phi's frame")
    xs, ys, ws = vector("x", a, sort), vector("y", b, sort), vector("w", c, sort)
    zs = vector("z", z_length, sort)
    inst = substitute(f, frame, xs + ys + ws)
    consequent = forall(zs, Implies(Indep(xs, zs, ws), exists(ys, And(Indep(xs + ys, zs, ws), inst))))
    return forall(xs + ws, Implies(exists(ys, inst), consequent))


@dataclass(frozen=True)
class Instance:
    schema: str
    label: str
    formula: Formula


def _splits(n: int) -> list[tuple[int, int, int]]:
    return [(a, b, n - a - b) for a in range(n + 1) for b in range(1, n - a + 1)]


def instances(schema_id: str, lengths: Sequence[int] = (0, 1, 2), sort: str = "A") -> list[Instance]:
    """Every instance of a schema used by the axiom suite."""
    out: list[Instance] = []
    if schema_id == "equiv:F":
        for name, f, frame in battery(sort):
            out.append(Instance(schema_id, f"Phi={name}", instantiate_schema(schema_id, len(frame), sort, phi=(f, frame))))
        return out
    if schema_id == EXISTENCE:
        for name, f, frame in battery(sort):
            for split in _splits(len(frame)):
                label = f"Phi={name},split={'/'.join(map(str, split))}"
                out.append(Instance(schema_id, label, instantiate_schema(schema_id, 0, sort, phi=(f, frame), split=split)))
        return out
    for n in lengths:
        if schema_id in NEEDS_PERMUTATIONS:
            k = NEEDS_PERMUTATIONS[schema_id]
            for combo in itertools.product(itertools.permutations(range(n)), repeat=k):
                label = f"n={n},perms={'/'.join(''.join(map(str, p)) or '-' for p in combo)}"
                out.append(Instance(schema_id, label, instantiate_schema(schema_id, n, sort, perms=combo)))
        else:
            out.append(Instance(schema_id, f"n={n}", instantiate_schema(schema_id, n, sort)))
    return out


NEGATIVE_CONTROL = "forall x:A. forall y:B. indep(x ; y |)"


# Stock classical tautologies over free x, y : A; bound v, w range over A or B.
CLASSICAL = (
    ("excluded-middle", "eq(x, y) or not eq(x, y)"),
    ("non-contradiction", "not (equiv(x ; y) and not equiv(x ; y))"),
    ("double-negation", "not not indep(x ; y |) -> indep(x ; y |)"),
    ("peirce", "((equiv(x ; y) -> indep(x ; y |)) -> equiv(x ; y)) -> equiv(x ; y)"),
    ("de-morgan-and", "not (eq(x, y) and indep(x ; y |)) -> not eq(x, y) or not indep(x ; y |)"),
    ("de-morgan-and-converse", "not eq(x, y) or not indep(x ; y |) -> not (eq(x, y) and indep(x ; y |))"),
    ("de-morgan-or", "not (equiv(x ; y) or indep(x ; x |)) -> not equiv(x ; y) and not indep(x ; x |)"),
    ("de-morgan-or-converse", "not equiv(x ; y) and not indep(x ; x |) -> not (equiv(x ; y) or indep(x ; x |))"),
    ("contraposition", "(indep(x ; y |) -> eq(x, y)) -> (not eq(x, y) -> not indep(x ; y |))"),
    ("linearity", "(eq(x, y) -> equiv(x ; y)) or (equiv(x ; y) -> eq(x, y))"),
    ("not-forall", "not (forall v:A. eq(x, v)) -> exists v:A. not eq(x, v)"),
    ("exists-not", "(exists v:A. not eq(x, v)) -> not (forall v:A. eq(x, v))"),
    ("not-exists", "not (exists v:B. indep(v ; x |)) -> forall v:B. not indep(v ; x |)"),
    ("forall-not", "(forall v:B. not indep(v ; x |)) -> not (exists v:B. indep(v ; x |))"),
    ("instantiation", "(forall v:A. equiv(v ; x)) -> equiv(y ; x)"),
    ("generalisation", "indep(y ; x |) -> exists v:A. indep(v ; x |)"),
    ("drinker", "exists v:A. (indep(v ; x |) -> forall w:A. indep(w ; x |))"),
    ("forall-and", "(forall v:A. eq(x, v) and equiv(v ; y)) -> forall v:A. eq(x, v)"),
    ("exists-or", "(exists v:B. indep(v ; x |) or not indep(v ; y |)) -> (exists v:B. indep(v ; x |)) or (exists v:B. not indep(v ; y |))"),
    ("forall-import", "(forall v:A. eq(x, y) -> indep(v ; x |)) -> (eq(x, y) -> forall v:A. indep(v ; x |))"),
)


def classical_battery() -> list[tuple[str, Formula]]:
    ctx = {"x": "A", "y": "A"}
    return [(name, _close(parse(text, context=ctx))) for name, text in CLASSICAL]
