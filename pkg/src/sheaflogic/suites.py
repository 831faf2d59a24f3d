"""Check suites shared by the command line, the scripts and the tests.

Every suite returns ``CheckResult`` records in a fixed order, so reports are
reproducible for a fixed configuration.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .category import CheckResult, SurCategory, check_ip_axioms, check_pairing_terminal, commuting_squares
from .corpus import CorpusConfig, compare, generate, oracle_cost
from .fincat import FinSet, pairing, surjections
from .generic import Memo, SurNVModel, atomic_cond_indep, atomic_equiv
from .multiteam import NondetVar, SortValueSet, SupportTriple, all_vars, cond_indep, equiextensive, nv_square_is_pullback
from .oracle import Assignment, force, locality_invariant, random_surjection, restriction_invariant
from .parser import parse
from .schanuel import (
    IopCategory,
    SchanuelModel,
    all_tuples,
    cond_indep_tuples,
    iop_hom,
    iop_pairing,
    nominal_signature,
    orbit_equiv,
    valid_nominal,
)
from .schemas import NEGATIVE_CONTROL, SCHEMAS, classical_battery, instances
from .signature import uniform
from .syntax import to_text
from .teams import ResourceExceeded, explain, singleton_team, valid


@dataclass(frozen=True)
class Task:
    name: str
    kind: str  # "multiteam" | "schanuel"
    formula_text: str
    sizes: tuple[tuple[str, int], ...]
    engine: str = "auto"
    cap: int = 2 ** 20


def _run_task(task: Task) -> CheckResult:
    start = time.perf_counter()
    try:
        if task.kind == "multiteam":
            sig = uniform(dict(task.sizes))
            f = parse(task.formula_text, signature=sig)
            v = valid(f, sig, cap=task.cap, engine=task.engine)
            cex = v.countermodel.to_json(sig) if v.countermodel is not None else None
            return CheckResult(task.name, v.valid, v.checked, cex, time.perf_counter() - start, v.engine)
        sig = nominal_signature(dict(task.sizes).get("arity", 1))
        f = parse(task.formula_text, signature=sig)
        ok, world = valid_nominal(f, dict(task.sizes)["worlds"], sig)
        return CheckResult(task.name, ok, 1, None if ok else {"world": world}, time.perf_counter() - start, "nominal")
    except ResourceExceeded as exc:
        return CheckResult(task.name, False, 0, None, time.perf_counter() - start, str(exc), exceeded=True)


def run_tasks(tasks: Sequence[Task], jobs: int = 1) -> list[CheckResult]:
    if jobs <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=4))


def axiom_tasks(
    model: str = "multiteam",
    sizes: Sequence[int] = (2, 3),
    lengths: Sequence[int] = (0, 1, 2),
    worlds: int = 3,
    schemas: Sequence[str] = SCHEMAS,
    engine: str = "auto",
    cap: int = 2 ** 20,
) -> list[Task]:
    tasks = []
    if model == "multiteam":
        for k in sizes:
            for sid in schemas:
                for ins in instances(sid, lengths, "A"):
                    tasks.append(Task(f"multiteam:{sid}[{ins.label}]@|A|={k}", model, to_text(ins.formula), (("A", k),), engine, cap))
    elif model == "schanuel":
        for sid in schemas:
            for ins in instances(sid, lengths, "N"):
                tasks.append(Task(f"schanuel:{sid}[{ins.label}]@worlds<={worlds}", model, to_text(ins.formula), (("worlds", worlds),)))
    else:
        raise ValueError(f"unknown model {model}")
    return tasks


def negative_control(size: int = 2) -> CheckResult:
    """Pairwise independence of all variables must fail, witnessed by the diagonal."""
    start = time.perf_counter()
    sig = uniform({"A": size, "B": size})
    f = parse(NEGATIVE_CONTROL, signature=sig)
    v = valid(f, sig, engine="enumerate")
    cex = None
    if v.countermodel is not None:
        cex = {"team": v.countermodel.to_json(sig), "trace": explain(f, singleton_team(), sig)}
    return CheckResult(f"multiteam:negative-control@|A|=|B|={size}", not v.valid, v.checked, cex, time.perf_counter() - start,
                       "INVALID as required" if not v.valid else "unexpectedly VALID")


def classicality(max_size: int = 3) -> list[CheckResult]:
    out = []
    for name, f in classical_battery():
        start = time.perf_counter()
        ok, checked, cex = True, 0, None
        for a, b in itertools.product(range(1, max_size + 1), repeat=2):
            sig = uniform({"A": a, "B": b})
            v = valid(f, sig, engine="auto")
            checked += 1
            if not v.valid:
                ok, cex = False, {"sizes": [a, b], "team": v.countermodel.to_json(sig)}
                break
        out.append(CheckResult(f"classical:{name}@sorts<={max_size}", ok, checked, cex, time.perf_counter() - start))
    return out


# ------------------------------------------------------------ categories


def nv_sheaf_criterion(bound: int = 3, max_sort: int = 3) -> CheckResult:
    """NV(A) sends independent squares to pullbacks of sets."""
    start = time.perf_counter()
    cat = SurCategory()
    n = 0
    for sq in commuting_squares(cat, bound):
        if not cat.is_independent(*sq):
            continue
        for k in range(1, max_sort + 1):
            n += 1
            if not nv_square_is_pullback(sq, SortValueSet.of_size("A", k)):
                return CheckResult(f"Sur:nv-sheaf-criterion@{bound}", False, n, {"square": [m.to_json() for m in sq], "sort": k})
    return CheckResult(f"Sur:nv-sheaf-criterion@{bound}", True, n, None, time.perf_counter() - start)


def category_suite(bound: int = 3) -> list[CheckResult]:
    sur, iop = SurCategory(), IopCategory()
    out = check_ip_axioms(sur, bound)
    out.append(check_pairing_terminal(sur, lambda p, q: pairing(p, q)[1:], bound))
    out.append(nv_sheaf_criterion(bound))
    out += check_ip_axioms(iop, bound)
    out.append(check_pairing_terminal(iop, lambda p, q: iop_pairing(p, q)[1:], bound))
    return out


# ------------------------------------------------------------ generic cross-checks


def _agree(name: str, cases, left: Callable, right: Callable) -> CheckResult:
    start = time.perf_counter()
    n = 0
    for args in cases:
        n += 1
        a, b = left(*args), right(*args)
        if a != b:
            return CheckResult(name, False, n, {"args": [_show(x) for x in args], "generic": a, "closed_form": b})
    return CheckResult(name, True, n, None, time.perf_counter() - start)


def _show(x):
    return x.to_json() if hasattr(x, "to_json") else repr(x)


def nv_equiv_crosscheck(max_sample: int = 4, max_sort: int = 3, method: str = "support") -> CheckResult:
    m = Memo(SurNVModel())
    A = SortValueSet.of_size("A", max_sort)
    cases = (
        (x, y)
        for n in range(1, max_sample + 1)
        for x, y in itertools.product(list(all_vars(n, A)), repeat=2)
    )
    return _agree(f"Sur:atomic-equiv[{method}]=equiextensive@|Omega|<={max_sample},|A|<={max_sort}",
                  cases, lambda x, y: atomic_equiv(m, x, y, method), equiextensive)


def nv_indep_crosscheck(max_sample: int = 4, max_sort: int = 3, method: str = "canonical") -> CheckResult:
    m = Memo(SurNVModel())
    A = SortValueSet.of_size("A", max_sort)
    cases = (
        t
        for n in range(1, max_sample + 1)
        for t in itertools.product(list(all_vars(n, A)), repeat=3)
    )
    return _agree(f"Sur:atomic-cond-indep[{method}]=cond-indep@|Omega|<={max_sample},sorts<={max_sort}",
                  cases, lambda x, y, z: atomic_cond_indep(m, x, y, z, method), cond_indep)


def nominal_equiv_crosscheck(max_world: int = 4, max_arity: int = 3, method: str = "support") -> CheckResult:
    m = Memo(SchanuelModel())
    cases = (
        (x, y)
        for w in range(max_world + 1)
        for a in range(max_arity + 1)
        for x, y in itertools.product(list(all_tuples(w, a)), repeat=2)
    )
    return _agree(f"Iop:atomic-equiv[{method}]=orbit-equiv@worlds<={max_world},arity<={max_arity}",
                  cases, lambda x, y: atomic_equiv(m, x, y, method), orbit_equiv)


def nominal_indep_crosscheck(max_world: int = 4, max_arity: int = 3, method: str = "canonical") -> CheckResult:
    m = Memo(SchanuelModel())

    def cases():
        for w in range(max_world + 1):
            ts = [t for a in range(max_arity + 1) for t in all_tuples(w, a)]
            yield from itertools.product(ts, repeat=3)

    return _agree(f"Iop:atomic-cond-indep[{method}]=support-rule@worlds<={max_world},arity<={max_arity}",
                  cases(), lambda x, y, z: atomic_cond_indep(m, x, y, z, method), cond_indep_tuples)


def support_stability(model, elements, maps_into, name: str) -> CheckResult:
    """A factorisation of x is a support exactly when its restriction along q is one for x . q."""
    start = time.perf_counter()
    n = 0
    for x in elements:
        X = model.obj(x)
        factorisations = []
        for f in model.maps_from(X):
            y = model.descend(x, f)
            if y is not None:
                factorisations.append(SupportTriple(model.cat.cod(f), f, y))
        for q in maps_into(X):
            xq = model.restrict(x, q)
            for t in factorisations:
                n += 1
                moved = SupportTriple(t.obj, model.compose(q, t.map), t.elem)
                if model.is_support(x, t) != model.is_support(xq, moved):
                    return CheckResult(name, False, n, {"x": _show(x), "q": _show(q), "map": _show(t.map)})
    return CheckResult(name, True, n, None, time.perf_counter() - start)


def nv_support_stability(bound: int = 3, max_sort: int = 3) -> CheckResult:
    A = SortValueSet.of_size("A", max_sort)
    elements = [x for n in range(1, bound + 1) for x in all_vars(n, A)]

    def maps_into(X):
        return [f for m in range(X.size, bound + 2) for f in surjections(m, X.size)]

    return support_stability(SurNVModel(), elements, maps_into, f"Sur:support-stability@|Omega|<={bound},|A|<={max_sort}")


def nominal_support_stability(max_world: int = 3, max_arity: int = 2) -> CheckResult:
    elements = [t for w in range(max_world + 1) for a in range(max_arity + 1) for t in all_tuples(w, a)]

    def maps_into(X):
        return [f for y in range(X, max_world + 2) for f in iop_hom(y, X)]

    return support_stability(SchanuelModel(), elements, maps_into, f"Iop:support-stability@worlds<={max_world},arity<={max_arity}")


# ------------------------------------------------------------ oracle


def metamorphic_suite(count: int = 1000, seed: int = 0, max_sample: int = 3, cost_cap: int = 200_000) -> list[CheckResult]:
    """Restriction along seeded surjections and locality, on fresh corpus entries.

    The restriction grows the sample by at most one point, and only when the
    oracle cost at the larger sample stays under ``cost_cap``; otherwise the
    surjection is a permutation.
    """
    rng = random.Random(seed)
    cfg = CorpusConfig(size=count, seed=seed, max_sample=max_sample, cost_cap=cost_cap)
    restriction = locality = 0
    grown = 0
    fail_r = fail_l = None
    start = time.perf_counter()
    for e in generate(cfg):
        n = e.rho.sample
        extra = 1 if oracle_cost(e.formula, n + 1, e.sig) <= cost_cap else 0
        grown += extra
        c = random_surjection(rng, n, n + extra)
        restriction += 1
        if fail_r is None and not restriction_invariant(e.rho, e.formula, e.sig, c):
            fail_r = {"entry": e.to_json(), "map": c.to_json()}
        padded = Assignment(n, {**e.rho.bindings, "unused": NondetVar(FinSet(n), e.sig.carrier("A"), tuple(
            rng.choice(e.sig.carrier("A").values) for _ in range(n)))})
        locality += 1
        if fail_l is None and not (locality_invariant(e.rho, e.formula, e.sig)
                                   and force(padded, e.formula, e.sig) == force(e.rho, e.formula, e.sig)):
            fail_l = {"entry": e.to_json()}
    took = time.perf_counter() - start
    return [
        CheckResult(f"oracle:restriction-invariance@seed={seed},n={count}", fail_r is None, restriction, fail_r, took,
                    f"{grown} maps enlarge the sample"),
        CheckResult(f"oracle:locality@seed={seed},n={count}", fail_l is None, locality, fail_l, took),
    ]


def oracle_diff(cfg: CorpusConfig, mode: str = "canonical", bound_factor: int = 1) -> tuple[CheckResult, list]:
    start = time.perf_counter()
    n, divergences = compare(generate(cfg), mode=mode, bound_factor=bound_factor)
    name = f"oracle-diff[{mode},x{bound_factor}]@seed={cfg.seed},n={cfg.size}"
    cex = [d.__dict__ for d in divergences] or None
    return CheckResult(name, not divergences, n, cex, time.perf_counter() - start), divergences
