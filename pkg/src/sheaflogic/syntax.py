"""Formula syntax: immutable AST nodes, free variables, printing, substitution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


class SortError(ValueError):
    """A formula is ill-sorted.  ``variable`` names the offender when known."""

    def __init__(self, message: str, variable: str | None = None):
        super().__init__(message)
        self.variable = variable


@dataclass(frozen=True, order=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


Vec = tuple  # tuple[Var, ...]


@dataclass(frozen=True)
class Eq:
    x: Var
    y: Var


@dataclass(frozen=True)
class Equiv:
    xs: Vec
    ys: Vec


@dataclass(frozen=True)
class Indep:
    xs: Vec
    ys: Vec
    zs: Vec = ()


@dataclass(frozen=True)
class Rel:
    name: str
    args: Vec


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


Atom = Union[Eq, Equiv, Indep, Rel]
Formula = Union[Eq, Equiv, Indep, Rel, Not, And, Or, Implies, Exists, Forall]
ATOMS = (Eq, Equiv, Indep, Rel)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)


# ------------------------------------------------------------ builders


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def forall(vs: Sequence[Var], body: Formula) -> Formula:
    for v in reversed(vs):
        body = Forall(v, body)
    return body


def exists(vs: Sequence[Var], body: Formula) -> Formula:
    for v in reversed(vs):
        body = Exists(v, body)
    return body


def vec(*names: str, sort: str = "A") -> Vec:
    return tuple(Var(n, sort) for n in names)


# ----------------------------------------------------------- traversal


def atom_vars(a: Atom) -> tuple[Var, ...]:
    if isinstance(a, Eq):
        return (a.x, a.y)
    if isinstance(a, Equiv):
        return a.xs + a.ys
    if isinstance(a, Indep):
        return a.xs + a.ys + a.zs
    return a.args


def free_vars(f: Formula) -> frozenset[Var]:
    return frozenset(_free(f, frozenset()))


def free_vars_ordered(f: Formula) -> list[Var]:
    """Free variables in order of first occurrence."""
    seen: dict[Var, None] = {}
    for v in _free(f, frozenset()):
        seen.setdefault(v, None)
    return list(seen)


def _free(f: Formula, bound: frozenset[str]) -> Iterator[Var]:
    if isinstance(f, ATOMS):
        for v in atom_vars(f):
            if v.name not in bound:
                yield v
    elif isinstance(f, Not):
        yield from _free(f.body, bound)
    elif isinstance(f, BINARY):
        yield from _free(f.left, bound)
        yield from _free(f.right, bound)
    elif isinstance(f, QUANTIFIERS):
        yield from _free(f.body, bound | {f.var.name})
    else:
        raise TypeError(f"not a formula: {f!r}")


def all_names(f: Formula) -> set[str]:
    names: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, ATOMS):
            names.update(v.name for v in atom_vars(g))
        elif isinstance(g, QUANTIFIERS):
            names.add(g.var.name)
    return names


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, QUANTIFIERS):
        yield from subformulas(f.body)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, BINARY):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


def is_quantifier_free(f: Formula) -> bool:
    return quantifier_depth(f) == 0


def check_sorts(f: Formula, rel_arity: dict[str, tuple[str, ...]] | None = None) -> None:
    """Raise ``SortError`` unless every atom is well sorted.

    Variables are identified by name within a scope, so one name may not be
    used at two sorts at once.
    """
    _check(f, {}, rel_arity)


def _check(f: Formula, scope: dict[str, str], rel_arity) -> None:
    if isinstance(f, ATOMS):
        for v in atom_vars(f):
            known = scope.get(v.name)
            if known is not None and known != v.sort:
                raise SortError(f"variable {v.name} used at sort {v.sort}, bound at {known}", v.name)
        if isinstance(f, Eq):
            if f.x.sort != f.y.sort:
                raise SortError(f"eq({f.x}, {f.y}) compares sorts {f.x.sort} and {f.y.sort}", f.y.name)
        elif isinstance(f, Equiv):
            if len(f.xs) != len(f.ys):
                raise SortError("equiv needs vectors of equal length", (f.xs + f.ys)[0].name)
            for a, b in zip(f.xs, f.ys):
                if a.sort != b.sort:
                    raise SortError(f"equiv pairs {a} : {a.sort} with {b} : {b.sort}", b.name)
        elif isinstance(f, Rel) and rel_arity is not None:
            if f.name not in rel_arity:
                raise SortError(f"unknown relation {f.name}")
            want = rel_arity[f.name]
            if len(want) != len(f.args):
                raise SortError(f"{f.name} takes {len(want)} arguments")
            for v, s in zip(f.args, want):
                if v.sort != s:
                    raise SortError(f"{f.name} expects {v} : {s}", v.name)
    elif isinstance(f, Not):
        _check(f.body, scope, rel_arity)
    elif isinstance(f, BINARY):
        _check(f.left, scope, rel_arity)
        _check(f.right, scope, rel_arity)
    elif isinstance(f, QUANTIFIERS):
        _check(f.body, {**scope, f.var.name: f.var.sort}, rel_arity)
    else:
        raise TypeError(f"not a formula: {f!r}")


# -------------------------------------------------------------- printing

_PREC = {Implies: 1, Or: 2, And: 3}


def _vlist(vs: Iterable[Var]) -> str:
    return ", ".join(v.name for v in vs)


def _atom_text(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"eq({a.x.name}, {a.y.name})"
    if isinstance(a, Equiv):
        return f"equiv({_vlist(a.xs)} ; {_vlist(a.ys)})"
    if isinstance(a, Indep):
        cond = f" {_vlist(a.zs)}" if a.zs else ""
        return f"indep({_vlist(a.xs)} ; {_vlist(a.ys)} |{cond})".replace("(  ;", "( ;").replace("  |", " |")
    return f"{a.name}({_vlist(a.args)})"


def to_text(f: Formula) -> str:
    """Render with minimal parentheses; ``parse(to_text(f))`` gives back ``f``."""
    return _show(f, 0, True)


def _show(f: Formula, ctx: int, tail: bool) -> str:
    if isinstance(f, ATOMS):
        return _atom_text(f)
    if isinstance(f, Not):
        return "not " + _show(f.body, 4, tail)
    if isinstance(f, QUANTIFIERS):
        kw = "forall" if isinstance(f, Forall) else "exists"
        binders = [f"{f.var.name}:{f.var.sort}"]
        body = f.body
        while type(body) is type(f):
            binders.append(f"{body.var.name}:{body.var.sort}")
            body = body.body
        text = f"{kw} {', '.join(binders)}. {_show(body, 0, True)}"
        return text if tail else f"({text})"
    prec = _PREC[type(f)]
    op = {And: "and", Or: "or", Implies: "->"}[type(f)]
    if isinstance(f, Implies):
        left = _show(f.left, prec + 1, False)
        right = _show(f.right, prec, tail or ctx > prec)
    else:
        left = _show(f.left, prec, False)
        right = _show(f.right, prec + 1, tail or ctx > prec)
    text = f"{left} {op} {right}"
    return f"({text})" if ctx > prec else text


# ----------------------------------------------------------- substitution


def fresh_name(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def substitute(f: Formula, frame: Sequence[Var], replacement: Sequence[Var]) -> Formula:
    """Simultaneously replace ``frame`` by ``replacement``, renaming binders apart."""
    frame, replacement = tuple(frame), tuple(replacement)
    if len(frame) != len(replacement):
        raise SortError("frame and replacement differ in length")
    if len({v.name for v in frame}) != len(frame):
        raise SortError("frame variables must be distinct")
    for a, b in zip(frame, replacement):
        if a.sort != b.sort:
            raise SortError(f"cannot replace {a} : {a.sort} by {b} : {b.sort}", b.name)
    extra = free_vars(f) - set(frame)
    if extra:
        v = min(extra)
        raise SortError(f"free variable {v} is not in the frame", v.name)
    mapping = {a.name: b for a, b in zip(frame, replacement)}
    taken = all_names(f) | {v.name for v in replacement}
    return _subst(f, mapping, taken)


def _subst(f: Formula, mapping: dict[str, Var], taken: set[str]) -> Formula:
    def sub(v: Var) -> Var:
        return mapping.get(v.name, v)

    if isinstance(f, Eq):
        return Eq(sub(f.x), sub(f.y))
    if isinstance(f, Equiv):
        return Equiv(tuple(map(sub, f.xs)), tuple(map(sub, f.ys)))
    if isinstance(f, Indep):
        return Indep(tuple(map(sub, f.xs)), tuple(map(sub, f.ys)), tuple(map(sub, f.zs)))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(map(sub, f.args)))
    if isinstance(f, Not):
        return Not(_subst(f.body, mapping, taken))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, mapping, taken), _subst(f.right, mapping, taken))
    v = f.var
    inner = {k: w for k, w in mapping.items() if k != v.name}
    live = {w.name for k, w in inner.items() if any(u.name == k for u in free_vars(f.body))}
    if v.name in live:
        new = Var(fresh_name(v.name, taken), v.sort)
        taken.add(new.name)
        inner[v.name] = new
        v = new
    return type(f)(v, _subst(f.body, inner, taken))


def universal_closure(f: Formula) -> Formula:
    return forall(free_vars_ordered(f), f)
