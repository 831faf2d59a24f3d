"""Team semantics: evaluation over finite sets of assignments.

Forcing at a sample set depends only on the joint image of the assignment,
which is a team.  Quantifiers range over extensions of the team: each row is
replaced by a nonempty set of rows, one per chosen value of the new variable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .signature import Signature
from .syntax import (
    ATOMS,
    And,
    Eq,
    Equiv,
    Exists,
    Forall,
    Formula,
    Implies,
    Indep,
    Not,
    Or,
    Rel,
    SortError,
    Var,
    all_names,
    fresh_name,
    free_vars_ordered,
    is_quantifier_free,
    substitute,
    to_text,
)


class ResourceExceeded(RuntimeError):
    """A configured enumeration cap was hit."""


@dataclass(frozen=True)
class Team:
    context: tuple[tuple[str, str], ...]
    rows: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "context", tuple(tuple(c) for c in self.context))
        object.__setattr__(self, "rows", frozenset(tuple(r) for r in self.rows))
        names = [n for n, _ in self.context]
        if len(set(names)) != len(names):
            raise SortError("team context repeats a variable")
        for r in self.rows:
            if len(r) != len(self.context):
                raise SortError(f"row {r} does not match context of length {len(self.context)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.context)

    def check(self, sig: Signature) -> None:
        for (name, sort), col in zip(self.context, zip(*self.rows) if self.rows else [()] * len(self.context)):
            carrier = set(sig.carrier(sort).values)
            for v in col:
                if v not in carrier:
                    raise SortError(f"value {v!r} of {name} is not in sort {sort}", name)

    def sorted_rows(self, sig: Signature | None = None) -> list[tuple]:
        if sig is None:
            return sorted(self.rows, key=repr)
        idx = [{v: i for i, v in enumerate(sig.carrier(s).values)} for _, s in self.context]
        return sorted(self.rows, key=lambda r: tuple(m[v] for m, v in zip(idx, r)))

    def to_json(self, sig: Signature | None = None) -> dict:
        return {"context": [list(c) for c in self.context], "rows": [list(r) for r in self.sorted_rows(sig)]}

    @classmethod
    def from_json(cls, data: dict) -> "Team":
        try:
            return cls(tuple(tuple(c) for c in data["context"]), frozenset(tuple(r) for r in data["rows"]))
        except (KeyError, TypeError) as exc:
            raise SortError(f"malformed team {data!r}") from exc

    def project(self, names: Sequence[str]) -> "Team":
        cols = [self.names.index(n) for n in names]
        ctx = tuple(self.context[c] for c in cols)
        return Team(ctx, frozenset(tuple(r[c] for c in cols) for r in self.rows))


def team_of_assignment(sample: int, rho: dict) -> Team:
    """The joint image of an assignment of nondeterministic variables."""
    names = sorted(rho)
    for n in names:
        if rho[n].sample.size != sample:
            raise SortError(f"{n} lives on a sample of size {rho[n].sample.size}, not {sample}", n)
    ctx = tuple((n, rho[n].sort.name) for n in names)
    return Team(ctx, frozenset(tuple(rho[n].values[w] for n in names) for w in range(sample)))


def singleton_team() -> Team:
    return Team((), frozenset({()}))


@dataclass
class Budget:
    """Counts team extensions visited; ``None`` means unlimited."""

    limit: int | None = None
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise ResourceExceeded(f"evaluation visited more than {self.limit} extensions")


def _subsets(values: Sequence) -> list[tuple]:
    """Nonempty subsets, by size then lexicographically."""
    return [c for k in range(1, len(values) + 1) for c in itertools.combinations(values, k)]


def extensions(rows: Sequence[tuple], values: Sequence) -> Iterator[list[tuple]]:
    """All extensions of ``rows`` by one more column, in canonical order."""
    choices = _subsets(values)
    for pick in itertools.product(choices, repeat=len(rows)):
        yield [r + (a,) for r, chosen in zip(rows, pick) for a in chosen]


def count_extensions(n_rows: int, n_values: int) -> int:
    return (2 ** n_values - 1) ** n_rows


# ---------------------------------------------------------- evaluation


def _proj(rows, cols):
    return {tuple(r[c] for c in cols) for r in rows}


def atom_holds(a, rows, env: dict[str, int], sig: Signature) -> bool:
    if isinstance(a, Eq):
        i, j = env[a.x.name], env[a.y.name]
        return all(r[i] == r[j] for r in rows)
    if isinstance(a, Equiv):
        return _proj(rows, [env[v.name] for v in a.xs]) == _proj(rows, [env[v.name] for v in a.ys])
    if isinstance(a, Indep):
        return indep_missing(a, rows, env) is None
    if isinstance(a, Rel):
        decl = sig.relations[a.name]
        vals = _proj(rows, [env[v.name] for v in a.args])
        if decl.kind == "box":
            return vals <= decl.tuples
        return bool(vals & decl.tuples)
    raise TypeError(a)


def indep_missing(a: Indep, rows, env: dict[str, int]):
    """A joint value that conditional independence demands but the team lacks."""
    xc = [env[v.name] for v in a.xs]
    yc = [env[v.name] for v in a.ys]
    zc = [env[v.name] for v in a.zs]
    triples = {(tuple(r[c] for c in xc), tuple(r[c] for c in yc), tuple(r[c] for c in zc)) for r in rows}
    by_z: dict = {}
    for x, y, z in triples:
        xs, ys = by_z.setdefault(z, (set(), set()))
        xs.add(x)
        ys.add(y)
    for z, (xs, ys) in by_z.items():
        for x in xs:
            for y in ys:
                if (x, y, z) not in triples:
                    return (x, y, z)
    return None


def _quant_values(f, sig: Signature) -> tuple:
    return sig.carrier(f.var.sort).values


def _ordered(rows, sig: Signature, sorts: Sequence[str]) -> list[tuple]:
    idx = [{v: i for i, v in enumerate(sig.carrier(s).values)} for s in sorts]
    return sorted(set(rows), key=lambda r: tuple(m[v] for m, v in zip(idx, r)))


class _Evaluator:
    def __init__(self, sig: Signature, budget: Budget | None):
        self.sig = sig
        self.budget = budget or Budget()

    def ev(self, f: Formula, rows, env: dict[str, int], sorts: tuple[str, ...]) -> bool:
        if isinstance(f, ATOMS):
            return atom_holds(f, rows, env, self.sig)
        if isinstance(f, Not):
            return not self.ev(f.body, rows, env, sorts)
        if isinstance(f, And):
            return self.ev(f.left, rows, env, sorts) and self.ev(f.right, rows, env, sorts)
        if isinstance(f, Or):
            return self.ev(f.left, rows, env, sorts) or self.ev(f.right, rows, env, sorts)
        if isinstance(f, Implies):
            return (not self.ev(f.left, rows, env, sorts)) or self.ev(f.right, rows, env, sorts)
        want = isinstance(f, Exists)
        for ext_rows, ext_env, ext_sorts in self.extend(f, rows, env, sorts):
            if self.ev(f.body, ext_rows, ext_env, ext_sorts) == want:
                return want
        return not want

    def extend(self, f, rows, env, sorts):
        ordered = _ordered(rows, self.sig, sorts)
        new_env = {**env, f.var.name: len(sorts)}
        new_sorts = sorts + (f.var.sort,)
        for ext in extensions(ordered, _quant_values(f, self.sig)):
            self.budget.spend()
            yield ext, new_env, new_sorts


def _env_of(team: Team) -> tuple[dict[str, int], tuple[str, ...]]:
    return {n: i for i, (n, _) in enumerate(team.context)}, tuple(s for _, s in team.context)


def _check_free(f: Formula, team: Team) -> None:
    ctx = dict(team.context)
    for v in free_vars_ordered(f):
        if v.name not in ctx:
            raise SortError(f"free variable {v.name} is not in the team context", v.name)
        if ctx[v.name] != v.sort:
            raise SortError(f"{v.name} has sort {v.sort} in the formula, {ctx[v.name]} in the team", v.name)


def evaluate(f: Formula, team: Team, sig: Signature, budget: Budget | None = None) -> bool:
    """Truth of ``f`` at ``team``.  ``FV(f)`` must lie inside the team context."""
    _check_free(f, team)
    env, sorts = _env_of(team)
    return _Evaluator(sig, budget).ev(f, team.rows, env, sorts)


# ------------------------------------------------------------ explanations


def explain(f: Formula, team: Team, sig: Signature, budget: Budget | None = None) -> list[dict]:
    """A path of subformulas justifying the verdict, ending at an atom when possible."""
    _check_free(f, team)
    env, sorts = _env_of(team)
    ev = _Evaluator(sig, budget)
    trace: list[dict] = []
    _why(ev, f, team.rows, env, sorts, trace)
    return trace


def _show_rows(rows, env, sorts, sig):
    names = sorted(env, key=env.get)
    live = [env[n] for n in names]
    proj = {tuple(r[c] for c in live) for r in rows}
    return {"context": [[n, sorts[env[n]]] for n in names], "rows": [list(r) for r in _ordered(proj, sig, [sorts[c] for c in live])]}


def _why(ev: _Evaluator, f, rows, env, sorts, trace) -> None:
    val = ev.ev(f, rows, env, sorts)
    step = {"formula": to_text(f), "value": val, "team": _show_rows(rows, env, sorts, ev.sig)}
    trace.append(step)
    if isinstance(f, Indep) and not val:
        step["missing"] = [list(p) for p in indep_missing(f, rows, env)]
    if isinstance(f, ATOMS):
        return
    if isinstance(f, Not):
        return _why(ev, f.body, rows, env, sorts, trace)
    if isinstance(f, (And, Or, Implies)):
        left = ev.ev(f.left, rows, env, sorts)
        if isinstance(f, And):
            nxt = f.left if not left else f.right
        elif isinstance(f, Or):
            nxt = f.left if left else f.right
        else:
            nxt = f.left if not left else f.right
        return _why(ev, nxt, rows, env, sorts, trace)
    want = isinstance(f, Exists)
    if val == want:
        for ext_rows, ext_env, ext_sorts in ev.extend(f, rows, env, sorts):
            if ev.ev(f.body, ext_rows, ext_env, ext_sorts) == want:
                step["extension"] = "witness" if want else "counterexample"
                return _why(ev, f.body, ext_rows, ext_env, ext_sorts, trace)
    else:
        step["extension"] = "none" if want else "all"


# ---------------------------------------------------------------- validity


@dataclass
class Verdict:
    valid: bool
    countermodel: Team | None = None
    engine: str = "enumerate"
    checked: int = 0
    formula: Formula | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self, sig: Signature | None = None) -> dict:
        return {
            "valid": self.valid,
            "engine": self.engine,
            "checked": self.checked,
            "countermodel": None if self.countermodel is None else self.countermodel.to_json(sig),
        }


def strip_universal_prefix(f: Formula) -> tuple[list[Var], Formula]:
    """Move a leading block of universal quantifiers into the context.

    A formula is valid exactly when its body holds at every team over the free
    variables together with the stripped ones.  Rebound names are renamed apart.
    """
    ctx = list(free_vars_ordered(f))
    taken = all_names(f)
    while isinstance(f, Forall):
        v = f.var
        body = f.body
        if any(u.name == v.name for u in ctx):
            new = Var(fresh_name(v.name, taken), v.sort)
            taken.add(new.name)
            frame = [u for u in free_vars_ordered(body)]
            body = substitute(body, frame, [new if u.name == v.name else u for u in frame])
            v = new
        ctx.append(v)
        f = body
    return ctx, f


def universe(ctx: Sequence[Var], sig: Signature) -> list[tuple]:
    return list(itertools.product(*(sig.carrier(v.sort).values for v in ctx)))


def count_teams(ctx: Sequence[Var], sig: Signature) -> int:
    n = 1
    for v in ctx:
        n *= sig.carrier(v.sort).size
    return 2 ** n - 1


def teams_over(ctx: Sequence[Var], sig: Signature, max_rows: int | None = None) -> Iterator[Team]:
    """Nonempty teams in canonical order: by size, then lexicographically."""
    u = universe(ctx, sig)
    context = tuple((v.name, v.sort) for v in ctx)
    top = len(u) if max_rows is None else min(max_rows, len(u))
    for k in range(1, top + 1):
        for rows in itertools.combinations(u, k):
            yield Team(context, frozenset(rows))


AUTO_ENUMERATE = 2 ** 12  # below this many teams, plain enumeration is faster


def valid(
    f: Formula,
    sig: Signature,
    cap: int = 2 ** 20,
    engine: str = "enumerate",
    max_rows: int | None = None,
    budget: Budget | None = None,
) -> Verdict:
    """Decide validity of ``f`` over the finite carriers of ``sig``.

    The enumerative engine visits teams in canonical order and returns the
    first countermodel; it raises ``ResourceExceeded`` past ``cap`` teams.
    ``engine="sat"`` uses the symbolic engine; ``"auto"`` picks one.
    """
    ctx, body = strip_universal_prefix(f)
    n = count_teams(ctx, sig)
    if engine == "auto":
        engine = "enumerate" if n <= min(cap, AUTO_ENUMERATE) and is_quantifier_free(body) else "sat"
    if engine == "sat":
        from .satcheck import valid_sat

        return valid_sat(f, sig)
    if engine != "enumerate":
        raise ValueError(f"unknown engine {engine}")
    if n > cap and max_rows is None:
        raise ResourceExceeded(f"{n} teams exceed the cap of {cap}")
    ev = _Evaluator(sig, budget)
    env = {v.name: i for i, v in enumerate(ctx)}
    sorts = tuple(v.sort for v in ctx)
    checked = 0
    for team in teams_over(ctx, sig, max_rows):
        checked += 1
        if checked > cap:
            raise ResourceExceeded(f"more than {cap} teams")
        if not ev.ev(body, team.rows, env, sorts):
            return Verdict(False, team, "enumerate", checked, f)
    return Verdict(True, None, "enumerate", checked, f)
