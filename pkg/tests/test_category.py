from __future__ import annotations

import pytest

from sheaflogic.category import CheckResult, SurCategory, check_ip_axioms, check_pairing_terminal, commuting_squares
from sheaflogic.fincat import pairing
from sheaflogic.schanuel import IopCategory, iop_pairing


@pytest.mark.parametrize("cat", [SurCategory(), IopCategory()], ids=["Sur", "Iop"])
@pytest.mark.parametrize("bound", [1, 2])
def test_ip_axioms_small(cat, bound):
    results = check_ip_axioms(cat, bound)
    assert len(results) == 7
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_pairing_terminal_small():
    assert check_pairing_terminal(SurCategory(), lambda p, q: pairing(p, q)[1:], 2).passed
    assert check_pairing_terminal(IopCategory(), lambda p, q: iop_pairing(p, q)[1:], 2).passed


def test_squares_commute():
    cat = SurCategory()
    n = 0
    for p, q, r, s in commuting_squares(cat, 2):
        n += 1
        assert cat.compose(p, r) == cat.compose(q, s)
    assert n > 0


def test_independent_pullback_is_independent():
    for cat in (SurCategory(), IopCategory()):
        for p, q, r, s in commuting_squares(cat, 2):
            u, v = cat.independent_pullback(r, s)
            assert cat.is_independent_pullback(u, v, r, s)


def test_check_result_status():
    assert CheckResult("a", True, 1, None).status == "pass"
    assert CheckResult("a", False, 1, None).status == "fail"
    assert CheckResult("a", False, 0, None, exceeded=True).status == "resource-exceeded"
    rec = CheckResult("a", True, 1, None, 0.5).to_json()
    assert "wall_time" not in rec
    assert CheckResult("a", True, 1, None, 0.5).to_json(timing=True)["wall_time"] == 0.5
