"""Finite categories with a class of independent squares, and bounded IP checks.

A category is given by a small interface (objects up to a size bound, hom
sets, composition and the two square predicates).  ``check_ip_axioms`` then
walks every commuting square with objects inside the bound and tests the
independent-pullback axioms, descent and the pasting lemma.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterator

from . import fincat
from .fincat import FinSet, FinSurjection

Mor = Hashable
Square = tuple  # (p, q, r, s), r . p == s . q


class FiniteCategory:
    """Interface used by the bounded checks.  Morphisms must be hashable."""

    name = "abstract"

    def objects(self, bound: int) -> list: ...

    def hom(self, x, y) -> list: ...

    def dom(self, f): ...

    def cod(self, f): ...

    def compose(self, f, g):
        """``g . f``."""

    def identity(self, x): ...

    def is_independent(self, p, q, r, s) -> bool: ...

    def is_independent_pullback(self, p, q, r, s) -> bool: ...

    def independent_pullback(self, r, s) -> tuple:
        """Complete a cospan to an independent pullback; returns ``(p, q)``."""

    def isomorphisms(self, x, y) -> list:
        return [f for f in self.hom(x, y) if self.size(x) == self.size(y)]

    def size(self, x) -> int: ...

    def describe(self, f) -> Any:
        return repr(f)

    def mediators(self, p2, q2, p, q) -> list:
        """Maps ``m`` with ``p . m == p2`` and ``q . m == q2``."""
        return [m for m in self.hom(self.dom(p2), self.dom(p))
                if self.compose(m, p) == p2 and self.compose(m, q) == q2]

    # derived helpers

    def commutes(self, p, q, r, s) -> bool:
        return self.compose(p, r) == self.compose(q, s)


class SurCategory(FiniteCategory):
    """Finite nonempty sets and surjections."""

    name = "Sur"

    def objects(self, bound: int) -> list[FinSet]:
        return [FinSet(n) for n in range(1, bound + 1)]

    def hom(self, x: FinSet, y: FinSet) -> list[FinSurjection]:
        return _sur_hom(x.size, y.size)

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def compose(self, f, g):
        return fincat.compose(f, g)

    def identity(self, x):
        return fincat.identity(x)

    def size(self, x) -> int:
        return x.size

    def is_independent(self, p, q, r, s) -> bool:
        return fincat._is_weak_pullback(p.map, q.map, r.map, s.map)

    def is_independent_pullback(self, p, q, r, s) -> bool:
        pairs = list(zip(p.map, q.map))
        return len(set(pairs)) == len(pairs) and self.is_independent(p, q, r, s)

    def independent_pullback(self, r, s):
        _, u, v = fincat.coconfluence_complete(r, s)
        return u, v

    def isomorphisms(self, x, y):
        if x.size != y.size:
            return []
        return _sur_hom(x.size, y.size)

    def describe(self, f):
        return f.to_json()

    def mediators(self, p2, q2, p, q):
        # solve pointwise, then keep the surjective choices
        target = p.dom
        options = []
        for x in range(p2.dom.size):
            cands = [m for m in range(target.size) if p.map[m] == p2.map[x] and q.map[m] == q2.map[x]]
            if not cands:
                return []
            options.append(cands)
        out = []
        for values in itertools.product(*options):
            if len(set(values)) == target.size:
                out.append(FinSurjection(p2.dom, target, values))
        return out


_HOM_CACHE: dict[tuple[int, int], list[FinSurjection]] = {}


def _sur_hom(m: int, n: int) -> list[FinSurjection]:
    key = (m, n)
    if key not in _HOM_CACHE:
        _HOM_CACHE[key] = list(fincat.surjections(m, n))
    return _HOM_CACHE[key]


# ----------------------------------------------------------------- checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    counterexample: Any = None
    seconds: float = 0.0
    detail: str = ""
    exceeded: bool = False

    @property
    def status(self) -> str:
        if self.exceeded:
            return "resource-exceeded"
        return "pass" if self.passed else "fail"

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "checked": self.checked,
            "countermodel": self.counterexample,
        }
        if self.detail:
            out["detail"] = self.detail
        if timing:
            out["wall_time"] = round(self.seconds, 4)
        return out


@dataclass
class _Squares:
    all: list = field(default_factory=list)
    by_q: dict = field(default_factory=lambda: defaultdict(list))
    by_cospan: dict = field(default_factory=lambda: defaultdict(list))


def commuting_squares(cat: FiniteCategory, bound: int) -> Iterator[Square]:
    objs = cat.objects(bound)
    cospans = defaultdict(list)
    for w in objs:
        for y in objs:
            for z in objs:
                for r in cat.hom(y, w):
                    for s in cat.hom(z, w):
                        cospans[(y, z)].append((r, s))
    for x in objs:
        for y in objs:
            hxy = cat.hom(x, y)
            if not hxy:
                continue
            for z in objs:
                hxz = cat.hom(x, z)
                if not hxz:
                    continue
                for r, s in cospans[(y, z)]:
                    for p in hxy:
                        rp = cat.compose(p, r)
                        for q in hxz:
                            if rp == cat.compose(q, s):
                                yield (p, q, r, s)


def _collect(cat: FiniteCategory, bound: int) -> _Squares:
    sq = _Squares()
    for square in commuting_squares(cat, bound):
        sq.all.append(square)
        sq.by_q[square[1]].append(square)
        sq.by_cospan[(square[2], square[3])].append(square)
    return sq


def _paste(cat, a, b):
    # a = (a1, f, g, a2), b = (b1, g, h, b2): paste along g
    return (cat.compose(a[0], b[0]), a[1], b[2], cat.compose(a[3], b[3]))


def _describe_square(cat, sq) -> dict:
    return {k: cat.describe(m) for k, m in zip("pqrs", sq)}


def _mediators(cat, p2, q2, p, q) -> list:
    return cat.mediators(p2, q2, p, q)


def check_ip_axioms(cat: FiniteCategory, bound: int) -> list[CheckResult]:
    """Bounded check of IP1-IP5, descent and the independent-pullback lemma."""
    results = []
    t0 = time.perf_counter()
    sqs = _collect(cat, bound)
    ind = {s: cat.is_independent(*s) for s in sqs.all}
    ipb = {s: ind[s] and cat.is_independent_pullback(*s) for s in sqs.all}
    setup = time.perf_counter() - t0
    objs = cat.objects(bound)

    def run(name, fn):
        start = time.perf_counter()
        passed, checked, cex = fn()
        results.append(CheckResult(name, passed, checked, cex, time.perf_counter() - start + (setup if name == "IP1" else 0.0)))

    def ip1():
        n = 0
        for x in objs:
            for y in objs:
                for f in cat.hom(x, y):
                    ix, iy = cat.identity(x), cat.identity(y)
                    for sq in ((ix, f, f, iy), (f, ix, iy, f)):
                        n += 1
                        if not cat.is_independent(*sq):
                            return False, n, _describe_square(cat, sq)
        return True, n, None

    def ip2():
        n = 0
        for s in sqs.all:
            if ind[s]:
                n += 1
                t = (s[1], s[0], s[3], s[2])
                if not cat.is_independent(*t):
                    return False, n, _describe_square(cat, s)
        return True, n, None

    def pasting(pred):
        n = 0
        for a in sqs.all:
            for b in sqs.by_q.get(a[2], ()):
                n += 1
                ab = _paste(cat, a, b)
                bad = pred(a, b, ab)
                if bad:
                    return False, n, {"A": _describe_square(cat, a), "B": _describe_square(cat, b)}
        return True, n, None

    def ip3():
        return pasting(lambda a, b, ab: ind[a] and ind[b] and not cat.is_independent(*ab))

    def ip4():
        return pasting(lambda a, b, ab: ipb[b] and cat.is_independent(*ab) and not ind[a])

    def ip5():
        n = 0
        for (r, s), on_cospan in sqs.by_cospan.items():
            n += 1
            u, v = cat.independent_pullback(r, s)
            canon = (u, v, r, s)
            if not (cat.commutes(*canon) and cat.is_independent(*canon) and cat.is_independent_pullback(*canon)):
                return False, n, {"cospan": [cat.describe(r), cat.describe(s)], "reason": "completion is not an independent pullback"}
            comparison = [sq for sq in on_cospan if ind[sq]] + [canon]
            # the completion has the universal property among independent squares
            for p2, q2, _, _ in comparison:
                if len(_mediators(cat, p2, q2, u, v)) != 1:
                    return False, n, {"cospan": [cat.describe(r), cat.describe(s)], "reason": "mediator not unique"}
            # and the pullback predicate agrees with that universal property
            for sq in on_cospan:
                if not ind[sq]:
                    continue
                universal = all(len(_mediators(cat, p2, q2, sq[0], sq[1])) == 1 for p2, q2, _, _ in comparison)
                if universal != ipb[sq]:
                    return False, n, {"square": _describe_square(cat, sq), "reason": "pullback predicate disagrees with universal property"}
        return True, n, None

    def descent():
        n = 0
        for sq in sqs.all:
            p, q, r, s = sq
            x = cat.dom(p)
            for v in objs:
                for e in cat.hom(v, x):
                    n += 1
                    kite = (cat.compose(e, p), cat.compose(e, q), r, s)
                    if cat.is_independent(*kite) != ind[sq]:
                        return False, n, {"square": _describe_square(cat, sq), "e": cat.describe(e)}
        return True, n, None

    def lemma():
        return pasting(
            lambda a, b, ab: (ipb[a] and ipb[b] and not (cat.is_independent(*ab) and cat.is_independent_pullback(*ab)))
            or (ipb[b] and cat.is_independent(*ab) and cat.is_independent_pullback(*ab) and not ipb[a])
        )

    run("IP1", ip1)
    run("IP2", ip2)
    run("IP3", ip3)
    run("IP4", ip4)
    run("IP5", ip5)
    run("descent", descent)
    run("ip-lemma", lemma)
    for r in results:
        r.name = f"{cat.name}:{r.name}@{bound}"
    return results


def check_pairing_terminal(cat: FiniteCategory, pairing, bound: int) -> CheckResult:
    """Each pair factorisation of a span factors uniquely through its pairing.

    ``pairing(p, q)`` must return ``(e, p2, q2)`` with ``p == p2 . e`` and
    ``q == q2 . e``.
    """
    start = time.perf_counter()
    objs = cat.objects(bound)
    n = 0
    for x in objs:
        for y in objs:
            for z in objs:
                for p in cat.hom(x, y):
                    for q in cat.hom(x, z):
                        e, p2, q2 = pairing(p, q)
                        if cat.compose(e, p2) != p or cat.compose(e, q2) != q:
                            return CheckResult(f"{cat.name}:pairing@{bound}", False, n, {"p": cat.describe(p), "q": cat.describe(q)})
                        pobj = cat.cod(e)
                        for xx in objs:
                            for e2 in cat.hom(x, xx):
                                for f2 in cat.hom(xx, y):
                                    if cat.compose(e2, f2) != p:
                                        continue
                                    for g2 in cat.hom(xx, z):
                                        if cat.compose(e2, g2) != q:
                                            continue
                                        n += 1
                                        ms = [m for m in cat.hom(xx, pobj)
                                              if cat.compose(e2, m) == e and cat.compose(m, p2) == f2 and cat.compose(m, q2) == g2]
                                        if len(ms) != 1:
                                            return CheckResult(f"{cat.name}:pairing@{bound}", False, n,
                                                               {"p": cat.describe(p), "q": cat.describe(q), "via": cat.describe(e2)})
    return CheckResult(f"{cat.name}:pairing@{bound}", True, n, None, time.perf_counter() - start)
