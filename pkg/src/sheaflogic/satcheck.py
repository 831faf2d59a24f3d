"""Symbolic validity checking with a SAT solver.

Team membership becomes one Boolean per tuple of the universe.  Atoms,
connectives and quantifier extensions are encoded with Tseitin gates; the
direction of each gate follows the polarity of its subformula:

* at positive polarity the gate literal implies the subformula,
* at negative polarity the subformula implies the gate literal.

An extension quantifier whose witness the solver may choose ("easy": an
existential at positive polarity, a universal at negative polarity) is
encoded directly with fresh membership variables.  The other quantifiers
("hard") are handled by counterexample-guided refinement: the solver treats
their literal as free, each candidate model is checked by a nested search
for a witness, and every witness found is turned into a clause.  Nested
searches recurse, so arbitrary alternation is supported.

Witness clauses are generalised with join templates: a block of new
variables ranges over the values of some existing columns at rows that agree
on a key.  A template that works at a concrete team is encoded as a function
of the membership variables, which typically closes the whole search in one
step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from pysat.solvers import Solver

from .signature import Signature
from .syntax import (
    ATOMS,
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
    Var,
    is_quantifier_free,
    subformulas,
)
from .teams import ResourceExceeded, Team, Verdict, evaluate, strip_universal_prefix, universe

TRUE = 1
FALSE = -1
SOLVER = "cadical153"


class SymTeam:
    """A team whose rows carry membership literals."""

    __slots__ = ("rows", "env", "sorts", "names", "parent", "_index")

    def __init__(self, rows, env, sorts, names, parent=None):
        self.rows = [(v, l) for v, l in rows if l != FALSE]
        self.env = env
        self.sorts = sorts
        self.names = names
        self.parent = parent
        self._index: dict = {}

    def index(self, cols: tuple[int, ...]) -> dict:
        got = self._index.get(cols)
        if got is None:
            got = {}
            for vals, lit in self.rows:
                got.setdefault(tuple(vals[c] for c in cols), []).append(lit)
            self._index[cols] = got
        return got

    def ancestors(self):
        t = self
        while t is not None:
            yield t
            t = t.parent


@dataclass
class _Hard:
    lit: int
    block: tuple[Var, ...]
    body: Formula
    team: SymTeam
    learned: set = field(default_factory=set)
    templates: set = field(default_factory=set)


@dataclass
class SatStats:
    iterations: int = 0
    witness_searches: int = 0
    template_hits: int = 0
    variables: int = 0


class _Problem:
    def __init__(self, sig: Signature, stats: SatStats, depth: int = 0, max_iterations: int = 100_000):
        self.sig = sig
        self.solver = Solver(name=SOLVER)
        self.top = 1
        self.solver.add_clause([TRUE])
        self.hard: list[_Hard] = []
        self.teams: list[SymTeam] = []
        self.sources: list[SymTeam] = []
        self.stats = stats
        self.depth = depth
        self.max_iterations = max_iterations
        self.model: list[int] | None = None
        self.equivs: dict = {}
        self._true: dict = {}

    # ---------------------------------------------------------- gates

    def new(self) -> int:
        self.top += 1
        return self.top

    def clause(self, lits: Sequence[int]) -> None:
        if TRUE in lits:
            return
        self.solver.add_clause([l for l in lits if l != FALSE])

    def and_(self, lits: Sequence[int]) -> int:
        out = set()
        for l in lits:
            if l == FALSE:
                return FALSE
            if l != TRUE:
                out.add(l)
        if not out:
            return TRUE
        if any(-l in out for l in out):
            return FALSE
        if len(out) == 1:
            return next(iter(out))
        v = self.new()
        for l in out:
            self.solver.add_clause([-v, l])
        self.solver.add_clause([v] + [-l for l in out])
        return v

    def or_(self, lits: Sequence[int]) -> int:
        return -self.and_([-l for l in lits])

    def iff(self, a: int, b: int) -> int:
        if a == b:
            return TRUE
        if a == -b:
            return FALSE
        if a in (TRUE, FALSE):
            return b if a == TRUE else -b
        if b in (TRUE, FALSE):
            return a if b == TRUE else -a
        v = self.new()
        self.solver.add_clause([-v, -a, b])
        self.solver.add_clause([-v, a, -b])
        self.solver.add_clause([v, a, b])
        self.solver.add_clause([v, -a, -b])
        return v

    # ---------------------------------------------------------- teams

    def base_team(self, ctx: Sequence[Var], free: bool) -> SymTeam:
        rows = []
        for vals in universe(ctx, self.sig):
            rows.append((vals, self.new() if free else TRUE))
        team = SymTeam(rows, {v.name: i for i, v in enumerate(ctx)}, tuple(v.sort for v in ctx), tuple(v.name for v in ctx))
        self.teams.append(team)
        self.sources.append(team)
        return team

    def child(self, team: SymTeam, var: Var, rows) -> SymTeam:
        t = SymTeam(rows, {**team.env, var.name: len(team.sorts)}, team.sorts + (var.sort,), team.names + (var.name,), team)
        self.teams.append(t)
        return t

    def extend_free(self, team: SymTeam, var: Var) -> tuple[SymTeam, list[tuple[int, list[int]]]]:
        values = self.sig.carrier(var.sort).values
        rows, cover = [], []
        for vals, m in team.rows:
            ns = []
            for a in values:
                n = self.new()
                if m != TRUE:
                    self.solver.add_clause([-n, m])
                rows.append((vals + (a,), n))
                ns.append(n)
            cover.append((m, ns))
        ext = self.child(team, var, rows)
        self.sources.append(ext)
        return ext, cover

    def occ(self, team: SymTeam, cols: tuple[int, ...], value: tuple) -> int:
        return self.or_(team.index(cols).get(value, ()))

    # ---------------------------------------------------------- encoding

    def lit(self, f: Formula, team: SymTeam, pol: int) -> int:
        if isinstance(f, ATOMS):
            return self.atom(f, team)
        if isinstance(f, Not):
            return -self.lit(f.body, team, -pol)
        if isinstance(f, And):
            return self.and_([self.lit(f.left, team, pol), self.lit(f.right, team, pol)])
        if isinstance(f, Or):
            return self.or_([self.lit(f.left, team, pol), self.lit(f.right, team, pol)])
        if isinstance(f, Implies):
            return self.or_([-self.lit(f.left, team, -pol), self.lit(f.right, team, pol)])
        return self.quant(f, team, pol)

    def atom(self, a, team: SymTeam) -> int:
        env = team.env
        if isinstance(a, Eq):
            i, j = env[a.x.name], env[a.y.name]
            return self.and_([-l for vals, l in team.rows if vals[i] != vals[j]])
        if isinstance(a, Equiv):
            self.equivs.setdefault(a, None)
            cx = tuple(env[v.name] for v in a.xs)
            cy = tuple(env[v.name] for v in a.ys)
            ix, iy = team.index(cx), team.index(cy)
            return self.and_([self.iff(self.or_(ix.get(v, ())), self.or_(iy.get(v, ()))) for v in set(ix) | set(iy)])
        if isinstance(a, Indep):
            cx = tuple(env[v.name] for v in a.xs)
            cy = tuple(env[v.name] for v in a.ys)
            cz = tuple(env[v.name] for v in a.zs)
            ixz = team.index(cx + cz)
            iyz = team.index(cy + cz)
            ixyz = team.index(cx + cy + cz)
            nx, ny = len(cx), len(cy)
            by_z: dict = {}
            for key in ixz:
                by_z.setdefault(key[nx:], ([], []))[0].append(key[:nx])
            for key in iyz:
                by_z.setdefault(key[ny:], ([], []))[1].append(key[:ny])
            parts = []
            for z, (xs, ys) in by_z.items():
                for x in xs:
                    ox = self.or_(ixz[x + z])
                    for y in ys:
                        oy = self.or_(iyz[y + z])
                        oj = self.or_(ixyz.get(x + y + z, ()))
                        parts.append(self.or_([-ox, -oy, oj]))
            return self.and_(parts)
        if isinstance(a, Rel):
            decl = self.sig.relations[a.name]
            cols = tuple(env[v.name] for v in a.args)
            idx = team.index(cols)
            if decl.kind == "box":
                return self.and_([-l for key, ls in idx.items() if key not in decl.tuples for l in ls])
            return self.or_([l for key, ls in idx.items() if key in decl.tuples for l in ls])
        raise TypeError(a)

    def quant(self, f, team: SymTeam, pol: int) -> int:
        is_ex = isinstance(f, Exists)
        if is_ex == (pol > 0):
            ext, cover = self.extend_free(team, f.var)
            guard = self.new()
            g = guard if is_ex else -guard
            for m, ns in cover:
                self.clause([-g, -m] + ns)
            body = self.lit(f.body, ext, pol)
            if is_ex:
                self.clause([-guard, body])
            else:
                self.clause([guard, -body])
            return guard
        block = [f.var]
        body = f.body
        while type(body) is type(f):
            block.append(body.var)
            body = body.body
        h = self.new()
        self.hard.append(_Hard(h, tuple(block), body if is_ex else Not(body), team))
        return h if is_ex else -h

    # ------------------------------------------------------------ solving

    def value(self, lit: int) -> bool:
        if lit == TRUE:
            return True
        if lit == FALSE:
            return False
        assert self.model is not None
        v = self.model[abs(lit) - 1] > 0 if abs(lit) <= len(self.model) else False
        return v if lit > 0 else not v

    def true_rows(self, team: SymTeam) -> list[tuple]:
        got = self._true.get(id(team))
        if got is None:
            got = [vals for vals, m in team.rows if self.value(m)]
            self._true[id(team)] = got
        return got

    def solve(self) -> bool:
        while True:
            self._true = {}
            self.stats.iterations += 1
            if self.stats.iterations > self.max_iterations:
                raise ResourceExceeded(f"refinement exceeded {self.max_iterations} iterations")
            if not self.solver.solve():
                self.model = None
                return False
            self.model = self.solver.get_model()
            refined = False
            pending = [h for h in self.hard if not self.value(h.lit)]
            for h in pending:
                rows = frozenset(vals for vals, m in h.team.rows if self.value(m))
                if rows in h.learned:
                    continue
                witness = self.find_witness(h, rows)
                if witness is None:
                    continue
                h.learned.add(rows)
                self.learn(h, rows, witness)
                refined = True
            if not refined:
                return True

    def close(self) -> None:
        self.solver.delete()

    def find_witness(self, h: _Hard, rows: frozenset) -> frozenset | None:
        """Search a block extension of the concrete team ``rows`` satisfying ``h.body``."""
        self.stats.witness_searches += 1
        sub = _Problem(self.sig, self.stats, self.depth + 1, self.max_iterations)
        try:
            base = SymTeam([(v, TRUE) for v in sorted(rows)], h.team.env, h.team.sorts, h.team.names)
            sub.sources.append(base)
            cur = base
            layers = []
            for var in h.block:
                cur, cover = sub.extend_free(cur, var)
                for m, ns in cover:
                    sub.clause([-m] + ns)
                layers.append(cur)
            sub.clause([sub.lit(h.body, cur, +1)])
            if not sub.solve():
                return None
            return frozenset(vals for vals, n in cur.rows if sub.value(n))
        finally:
            sub.close()

    def learn(self, h: _Hard, rows: frozenset, witness: frozenset) -> None:
        # Concrete witness on the rows that were present, every value elsewhere.
        width = len(h.team.sorts)
        n = len(h.block)
        prefixes = [set() for _ in range(n + 1)]
        for w in witness:
            for j in range(n + 1):
                prefixes[j].add(w[: width + j])
        cur = h.team
        for j, var in enumerate(h.block):
            values = self.sig.carrier(var.sort).values
            new_rows = []
            for vals, m in cur.rows:
                concrete = vals[:width] in rows
                for a in values:
                    ext = vals + (a,)
                    if not concrete or ext in prefixes[j + 1]:
                        new_rows.append((ext, m))
            cur = self.child(cur, var, new_rows)
        d = self.lit(h.body, cur, -1)
        self.clause([-d, h.lit])
        self.templates(h, rows, witness)

    # ---------------------------------------------------------- templates

    def templates(self, h: _Hard, rows: frozenset, witness: frozenset) -> None:
        for tpl in _candidate_templates(self, h):
            key = (id(tpl.source), tpl.ks, tpl.kt, tpl.target)
            if key in h.templates:
                continue
            if tpl.works_on(self, h, rows):
                h.templates.add(key)
                self.stats.template_hits += 1
                tpl.encode(self, h)
                return


@dataclass(frozen=True)
class _Join:
    """New block values range over ``source[target]`` at rows with ``source[ks] == row[kt]``."""

    source: SymTeam
    ks: tuple[int, ...]
    kt: tuple[int, ...]
    target: tuple[int, ...]

    def concrete(self, p: _Problem, h: _Hard, rows: frozenset) -> list[tuple] | None:
        src = p.true_rows(self.source)
        table: dict = {}
        for s in src:
            table.setdefault(tuple(s[c] for c in self.ks), set()).add(tuple(s[c] for c in self.target))
        out = []
        for r in rows:
            opts = table.get(tuple(r[c] for c in self.kt))
            if not opts:
                return None
            out.extend(r + o for o in opts)
        return out

    def works_on(self, p: _Problem, h: _Hard, rows: frozenset) -> bool:
        ext = self.concrete(p, h, rows)
        if ext is None:
            return False
        context = tuple(zip(h.team.names, h.team.sorts)) + tuple((v.name, v.sort) for v in h.block)
        try:
            return _quick_eval(p, h, context, ext)
        except ResourceExceeded:
            return False

    def encode(self, p: _Problem, h: _Hard) -> None:
        idx = self.source.index(self.ks + self.target)
        width = len(h.team.sorts)
        nk = len(self.ks)
        buckets: dict = {}
        for key, lits in idx.items():
            buckets.setdefault(key[:nk], []).append((key[nk:], lits))
        final_rows = []
        cover = []
        for vals, m in h.team.rows:
            got = []
            for tval, lits in buckets.get(tuple(vals[c] for c in self.kt), ()):
                n = p.and_([m, p.or_(lits)])
                final_rows.append((vals + tval, n))
                got.append(n)
            cover.append(p.or_([-m] + got))
        ok = p.and_(cover)
        cur = h.team
        for j, var in enumerate(h.block):
            if j == len(h.block) - 1:
                rows = final_rows
            else:
                grouped: dict = {}
                for vals, n in final_rows:
                    grouped.setdefault(vals[: width + j + 1], []).append(n)
                rows = [(k, p.or_(ls)) for k, ls in grouped.items()]
            cur = p.child(cur, var, rows)
        d = p.lit(h.body, cur, -1)
        p.clause([-ok, -d, h.lit])


def _quick_eval(p: _Problem, h: _Hard, context, rows) -> bool:
    from .teams import Budget

    if not is_quantifier_free(h.body):
        return _concrete_sat(p, context, rows, h.body)
    names = [n for n, _ in context]
    # shadowed names: keep the last occurrence
    keep = [i for i, n in enumerate(names) if n not in names[i + 1:]]
    team = Team(tuple(context[i] for i in keep), frozenset(tuple(r[i] for i in keep) for r in rows))
    return evaluate(h.body, team, p.sig, Budget(20_000))


def _concrete_sat(p: _Problem, context, rows, body: Formula) -> bool:
    """Decide ``body`` on a fixed team with a nested symbolic search."""
    sub = _Problem(p.sig, p.stats, p.depth + 1, p.max_iterations)
    try:
        env = {n: i for i, (n, _) in enumerate(context)}
        team = SymTeam([(tuple(r), TRUE) for r in sorted(set(rows))], env, tuple(s for _, s in context), tuple(n for n, _ in context))
        sub.sources.append(team)
        sub.clause([sub.lit(body, team, +1)])
        return sub.solve()
    finally:
        sub.close()


def _candidate_templates(p: _Problem, h: _Hard):
    """Join templates, most plausible first.

    1. Self-joins read off ``equiv`` atoms of the body: a block variable
       paired with a column takes that column's values at rows agreeing on
       the remaining pairs.
    2. Joins with earlier extensions carrying columns of the same name,
       keyed by identity or by an ``equiv`` correspondence seen so far.
    3. A small blind enumeration with keys of length at most one.
    """
    team = h.team
    env = team.env
    block = [v.name for v in h.block]
    seen: set = set()

    def emit(src, ks, kt, tgt):
        key = (id(src), tuple(ks), tuple(kt), tuple(tgt))
        if key in seen:
            return None
        seen.add(key)
        return _Join(src, tuple(ks), tuple(kt), tuple(tgt))

    body_equivs = [a for a in subformulas(h.body) if isinstance(a, Equiv)]
    for a in body_equivs:
        for side_b, side_o in ((a.xs, a.ys), (a.ys, a.xs)):
            tgt, ks, kt, ok = [], [], [], True
            for b, v in zip(h.block, [None] * len(h.block)):
                pos = [i for i, u in enumerate(side_b) if u.name == b.name]
                cands = [side_o[i] for i in pos if side_o[i].name not in block and side_o[i].name in env]
                if not cands:
                    ok = False
                    break
                tgt.append(env[cands[0].name])
            if not ok:
                continue
            for u, w in zip(side_b, side_o):
                if u.name in block or w.name in block:
                    continue
                if u.name in env and w.name in env:
                    kt.append(env[u.name])
                    ks.append(env[w.name])
            tpl = emit(team, ks, kt, tgt)
            if tpl:
                yield tpl

    for src in reversed(p.sources):
        if src is team:
            continue
        anc = _common_ancestor(src, team)
        if anc is None:
            continue
        width = len(anc.sorts)
        tgt = []
        for v in h.block:
            col = src.env.get(v.name)
            if col is None or col < width or src.sorts[col] != v.sort:
                break
            tgt.append(col)
        else:
            keys = [(tuple(range(width)), tuple(range(width)))]
            for a in p.equivs:
                names = [u.name for u in a.xs + a.ys]
                if all(n in anc.env for n in names):
                    xs = tuple(anc.env[u.name] for u in a.xs)
                    ys = tuple(anc.env[u.name] for u in a.ys)
                    keys += [(xs, ys), (ys, xs)]
            for ks, kt in keys:
                tpl = emit(src, ks, kt, tgt)
                if tpl:
                    yield tpl

    sorts_needed = tuple(v.sort for v in h.block)
    targets = list(itertools.product(*[[i for i, s in enumerate(team.sorts) if s == want] for want in sorts_needed]))
    cols = range(len(team.sorts))
    pairs = [((), ())] + [((a,), (b,)) for a in cols for b in cols if team.sorts[a] == team.sorts[b]]
    for ks, kt in pairs:
        for tgt in targets:
            tpl = emit(team, ks, kt, tgt)
            if tpl:
                yield tpl


def _shares_ancestor(a: SymTeam, b: SymTeam) -> bool:
    return _common_ancestor(a, b) is not None


def _common_ancestor(a: SymTeam, b: SymTeam) -> SymTeam | None:
    ids = {id(t) for t in b.ancestors()}
    for t in a.ancestors():
        if id(t) in ids:
            return t
    return None


# ---------------------------------------------------------------- driver


def valid_sat(f: Formula, sig: Signature, max_iterations: int = 100_000, verify: bool = True) -> Verdict:
    """Exact validity over the carriers of ``sig``; countermodels are re-checked."""
    ctx, body = strip_universal_prefix(f)
    stats = SatStats()
    p = _Problem(sig, stats, max_iterations=max_iterations)
    try:
        base = p.base_team(ctx, free=True)
        p.clause([m for _, m in base.rows])
        p.clause([p.lit(Not(body), base, +1)])
        sat = p.solve()
        stats.variables = p.top
        detail = {"iterations": stats.iterations, "witness_searches": stats.witness_searches, "template_hits": stats.template_hits}
        if not sat:
            return Verdict(True, None, "sat", 0, f, detail)
        rows = frozenset(vals for vals, m in base.rows if p.value(m))
        team = Team(tuple((v.name, v.sort) for v in ctx), rows)
    finally:
        p.close()
    if verify and (is_quantifier_free(body) or len(rows) <= 8):
        try:
            from .teams import Budget

            if evaluate(body, team, sig, Budget(200_000)):
                raise AssertionError(f"symbolic countermodel does not refute the formula: {team.to_json(sig)}")
            detail["verified"] = True
        except ResourceExceeded:
            detail["verified"] = False
    return Verdict(False, team, "sat", 0, f, detail)
