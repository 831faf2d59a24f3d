"""One test per acceptance criterion; each records a PASS/FAIL summary line."""

from __future__ import annotations

import time

from sheaflogic import suites
from sheaflogic.category import SurCategory, check_ip_axioms
from sheaflogic.corpus import CorpusConfig
from sheaflogic.schanuel import IopCategory
from sheaflogic.schemas import EQUIV_SCHEMAS, EXISTENCE, INDEP_SCHEMAS


def _failures(results) -> list[str]:
    return [r.name for r in results if not r.passed]


def test_1_oracle_equivalence(criterion):
    cfg = CorpusConfig(size=500, seed=0, max_sample=3, max_sort=3, max_quantifier_depth=2)
    start = time.perf_counter()
    result, divergences = suites.oracle_diff(cfg)
    took = time.perf_counter() - start
    ok = result.passed and result.checked >= 500 and took < 60
    criterion("1 oracle-equivalence", ok, f"{result.checked} pairs, {len(divergences)} divergences, {took:.1f}s")
    assert ok, result.counterexample


def test_1_bound_stability():
    cfg = CorpusConfig(size=200, seed=0, max_sample=2, mode="literal", bound_factor=2)
    result, _ = suites.oracle_diff(cfg, mode="literal", bound_factor=2)
    assert result.passed, result.counterexample


def test_2_equivalence_axioms(criterion):
    start = time.perf_counter()
    results = suites.run_tasks(suites.axiom_tasks("multiteam", (2, 3), (0, 1, 2), schemas=EQUIV_SCHEMAS))
    took = time.perf_counter() - start
    bad = _failures(results)
    ok = not bad and took < 60
    criterion("2 equivalence-axioms", ok, f"{len(results)} instances, {len(bad)} failures, {took:.1f}s")
    assert ok, bad


def test_3_independence_axioms(criterion):
    start = time.perf_counter()
    results = suites.run_tasks(suites.axiom_tasks("multiteam", (2, 3), (0, 1, 2), schemas=INDEP_SCHEMAS + (EXISTENCE,)))
    took = time.perf_counter() - start
    bad = _failures(results)
    n_exist = sum(1 for r in results if EXISTENCE in r.name)
    criterion("3 independence-axioms", not bad,
              f"{len(results)} instances ({n_exist} existence-preservation), {len(bad)} failures, {took:.1f}s")
    assert not bad, bad


def test_4_negative_control(criterion):
    r = suites.negative_control(2)
    trace = r.counterexample["trace"] if r.counterexample else []
    diagonal = bool(trace) and trace[-1]["team"]["rows"] == [[0, 0], [1, 1]]
    ok = r.passed and diagonal
    criterion("4 negative-control", ok, "INVALID, countermodel via the diagonal extension" if ok else r.detail)
    assert ok


def test_5_equivalence_crosscheck(criterion):
    r = suites.nv_equiv_crosscheck(4, 3)
    criterion("5 equiv-crosscheck", r.passed, f"{r.checked} pairs, {r.seconds:.1f}s")
    assert r.passed, r.counterexample


def test_6_cond_indep_crosscheck(criterion):
    r = suites.nv_indep_crosscheck(4, 3)
    criterion("6 cond-indep-crosscheck", r.passed, f"{r.checked} triples, {r.seconds:.1f}s")
    assert r.passed, r.counterexample


def test_7_independent_pullbacks(criterion):
    results = check_ip_axioms(SurCategory(), 3) + check_ip_axioms(IopCategory(), 3)
    bad = _failures(results)
    criterion("7 independent-pullback-axioms", not bad, f"{len(results)} checks, {len(bad)} failures")
    assert not bad, bad


def test_8_sheaf_criterion(criterion):
    r = suites.nv_sheaf_criterion(3, 3)
    criterion("8 sheaf-criterion", r.passed, f"{r.checked} square/sort pairs")
    assert r.passed, r.counterexample


def test_9_schanuel(criterion):
    checks = [suites.nominal_equiv_crosscheck(4, 3), suites.nominal_indep_crosscheck(4, 3)]
    axioms = suites.run_tasks(suites.axiom_tasks("schanuel", lengths=(0, 1, 2), worlds=3))
    bad = _failures(checks) + _failures(axioms)
    criterion("9 schanuel", not bad,
              f"{checks[0].checked} pairs, {checks[1].checked} triples, {len(axioms)} axiom instances, {len(bad)} failures")
    assert not bad, bad


def test_10_metamorphic(criterion):
    results = suites.metamorphic_suite(1000, seed=0)
    results += [suites.nv_support_stability(3, 3), suites.nominal_support_stability(3, 2)]
    bad = _failures(results)
    criterion("10 metamorphic", not bad,
              f"{results[0].checked} restriction, {results[1].checked} locality, "
              f"{results[2].checked + results[3].checked} support-stability cases")
    assert not bad, bad
