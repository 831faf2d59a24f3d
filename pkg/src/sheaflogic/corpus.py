"""Seeded corpus of (formula, assignment) pairs for oracle comparison."""

from __future__ import annotations

import json
import random
from math import comb
from dataclasses import asdict, dataclass
from typing import Iterator

from .fincat import FinSet
from .multiteam import NondetVar
from .parser import parse
from .signature import RelDecl, Signature, uniform
from .syntax import (
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
    Var,
    quantifier_depth,
    to_text,
)
from .oracle import Assignment, force
from .teams import evaluate, team_of_assignment


@dataclass
class CorpusConfig:
    size: int = 500
    seed: int = 0
    max_sample: int = 3
    max_sort: int = 3
    max_quantifier_depth: int = 2
    max_connectives: int = 3
    novel_atom_weight: float = 0.6  # share of equiv / indep atoms
    cost_cap: int = 200_000  # worst-case oracle witnesses per pair
    quantifier_free: bool = False
    mode: str = "canonical"  # oracle enumeration the cost estimate is for
    bound_factor: int = 1


@dataclass
class Entry:
    rho: Assignment
    formula: Formula
    sig: Signature

    def to_json(self) -> dict:
        return {
            **self.rho.to_json(),
            "formula": to_text(self.formula),
            "sorts": self.sig.to_json(),
            "relations": [
                {"name": r.name, "sorts": list(r.sorts), "kind": r.kind, "tuples": sorted(list(t) for t in r.tuples)}
                for r in self.sig.relations.values()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Entry":
        sig = Signature.from_json(data["sorts"])
        for r in data.get("relations", []):
            sig.relations[r["name"]] = RelDecl(r["name"], tuple(r["sorts"]), r["kind"], frozenset(tuple(t) for t in r["tuples"]))
        rho = Assignment.from_json(data, sig)
        ctx = {n: x.sort.name for n, x in rho.bindings.items()}
        return cls(rho, parse(data["formula"], context=ctx, signature=sig), sig)


def oracle_cost(f: Formula, sample: int, sig: Signature, mode: str = "canonical", bound_factor: int = 1) -> int:
    """Upper bound on witnesses the oracle visits."""
    if isinstance(f, (Eq, Equiv, Indep, Rel)):
        return 1
    if isinstance(f, Not):
        return oracle_cost(f.body, sample, sig, mode, bound_factor)
    if isinstance(f, (And, Or, Implies)):
        return oracle_cost(f.left, sample, sig, mode, bound_factor) + oracle_cost(f.right, sample, sig, mode, bound_factor)
    k = sig.carrier(f.var.sort).size
    if mode == "canonical":
        count = (2 ** k - 1) ** sample
        return count * (1 + oracle_cost(f.body, sample * k, sig, mode, bound_factor))
    total = 0
    for m, count in _literal_counts(sample, k, bound_factor * sample * k).items():
        total += count * (1 + oracle_cost(f.body, m, sig, mode, bound_factor))
    return total


def _literal_counts(n: int, k: int, bound: int) -> dict[int, int]:
    """Literal witnesses by sample size: ordered fibre sizes, one multiset per fibre."""
    part = {s: comb(s + k - 1, k - 1) for s in range(1, bound + 1)}
    ways = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for m, c in ways.items():
            for s, w in part.items():
                if m + s <= bound:
                    nxt[m + s] = nxt.get(m + s, 0) + c * w
        ways = nxt
    return ways


class _Gen:
    def __init__(self, cfg: CorpusConfig, rng: random.Random, sig: Signature):
        self.cfg = cfg
        self.rng = rng
        self.sig = sig
        self.fresh = 0

    def atom(self, scope: list[Var]) -> Formula:
        rng = self.rng
        by_sort: dict[str, list[Var]] = {}
        for v in scope:
            by_sort.setdefault(v.sort, []).append(v)
        if rng.random() < self.cfg.novel_atom_weight:
            if rng.random() < 0.5:
                n = rng.randint(0, 2)
                xs = tuple(rng.choice(scope) for _ in range(n))
                ys = tuple(rng.choice(by_sort[x.sort]) for x in xs)
                return Equiv(xs, ys)
            pick = lambda: tuple(rng.choice(scope) for _ in range(rng.randint(0, 2)))  # noqa: E731
            xs, ys = pick(), pick()
            if not xs and not ys:
                xs = (rng.choice(scope),)
            zs = tuple(rng.choice(scope) for _ in range(rng.randint(0, 1)))
            return Indep(xs, ys, zs)
        if rng.random() < 0.6 or not self.sig.relations:
            x = rng.choice(scope)
            return Eq(x, rng.choice(by_sort[x.sort]))
        decl = rng.choice(sorted(self.sig.relations.values(), key=lambda r: r.name))
        args = []
        for s in decl.sorts:
            options = by_sort.get(s)
            if not options:
                x = rng.choice(scope)
                return Eq(x, x)
            args.append(rng.choice(options))
        return Rel(decl.name, tuple(args))

    def formula(self, scope: list[Var], qdepth: int, size: int) -> Formula:
        rng = self.rng
        if size <= 0:
            return self.atom(scope)
        roll = rng.random()
        if qdepth > 0 and (roll < 0.45 or size <= qdepth):
            sort = rng.choice(sorted(self.sig.sorts))
            if rng.random() < 0.15:
                same = [v for v in scope if v.sort == sort]
                name = rng.choice(same).name if same else f"v{self.fresh}"
            else:
                name = f"v{self.fresh}"
                self.fresh += 1
            v = Var(name, sort)
            inner = [u for u in scope if u.name != name] + [v]
            body = self.formula(inner, qdepth - 1, size - 1)
            return Exists(v, body) if rng.random() < 0.5 else Forall(v, body)
        if roll < 0.5:
            return Not(self.formula(scope, qdepth, size - 1))
        left_size = rng.randint(0, size - 1)
        cls = rng.choice([And, Or, Implies])
        return cls(self.formula(scope, qdepth, left_size), self.formula(scope, qdepth, size - 1 - left_size))


def _signature(rng: random.Random, cfg: CorpusConfig) -> Signature:
    sig = uniform({"A": rng.randint(1, cfg.max_sort), "B": rng.randint(1, cfg.max_sort)})
    a, b = sig.carrier("A").values, sig.carrier("B").values
    box = frozenset((v,) for v in a if rng.random() < 0.6)
    dia = frozenset((u, v) for u in a for v in b if rng.random() < 0.3)
    sig.relations["P"] = RelDecl("P", ("A",), "box", box)
    sig.relations["Q"] = RelDecl("Q", ("A", "B"), "diamond", dia)
    return sig


def generate(cfg: CorpusConfig) -> Iterator[Entry]:
    rng = random.Random(cfg.seed)
    made = 0
    while made < cfg.size:
        sig = _signature(rng, cfg)
        n = rng.randint(1, cfg.max_sample)
        names = [("x", "A"), ("y", "A"), ("z", "A"), ("u", "B")][: rng.randint(1, 4)]
        sample = FinSet(n)
        rho = Assignment(n, {
            name: NondetVar(sample, sig.carrier(s), tuple(rng.choice(sig.carrier(s).values) for _ in range(n)))
            for name, s in names
        })
        scope = [Var(name, s) for name, s in names]
        qd = 0 if cfg.quantifier_free else rng.randint(0, cfg.max_quantifier_depth)
        f = _Gen(cfg, rng, sig).formula(scope, qd, rng.randint(qd, cfg.max_connectives + qd))
        if quantifier_depth(f) != qd or oracle_cost(f, n, sig, cfg.mode, cfg.bound_factor) > cfg.cost_cap:
            continue
        made += 1
        yield Entry(rho, f, sig)


def write_jsonl(entries, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(json.dumps(e.to_json(), sort_keys=True) + "\n")


def read_jsonl(path) -> list[Entry]:
    with open(path, encoding="utf-8") as fh:
        return [Entry.from_json(json.loads(line)) for line in fh if line.strip()]


@dataclass
class Divergence:
    index: int
    entry: dict
    team_value: bool
    oracle_value: bool


def compare(entries, mode: str = "canonical", bound_factor: int = 1) -> tuple[int, list[Divergence]]:
    """Run both semantics over ``entries``; returns (count, divergences)."""
    out = []
    count = 0
    for i, e in enumerate(entries):
        count += 1
        team = team_of_assignment(e.rho.sample, e.rho.bindings)
        tv = evaluate(e.formula, team, e.sig)
        ov = force(e.rho, e.formula, e.sig, mode=mode, bound_factor=bound_factor)
        if tv != ov:
            out.append(Divergence(i, e.to_json(), tv, ov))
    return count, out


def config_dict(cfg: CorpusConfig) -> dict:
    return asdict(cfg)
