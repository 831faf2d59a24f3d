from __future__ import annotations

import pytest

from sheaflogic.schemas import (
    BATTERY,
    EXISTENCE,
    SCHEMAS,
    SchemaError,
    battery,
    classical_battery,
    instances,
    instantiate_schema,
)
from sheaflogic.signature import uniform
from sheaflogic.syntax import free_vars, quantifier_depth, to_text
from sheaflogic.teams import valid

FROZEN = {
    "equiv:G": "forall x1:A, x1':A, y:A. equiv(x1 ; x1') -> exists y':A. equiv(x1, y ; x1', y')",
    "indep:A": "forall x1:A, y1:A. indep(x1 ; y1 | y1)",
    "indep:Z": "forall x1:A, z1:A, w1:A. exists y1:A. equiv(y1, w1 ; x1, w1) and indep(y1 ; z1 | w1)",
    "equiv:B": "forall x1:A, y1:A. equiv(x1 ; y1) -> equiv(y1 ; x1)",
}


@pytest.mark.parametrize("sid", sorted(FROZEN))
def test_frozen_instances(sid):
    assert to_text(instantiate_schema(sid, 1)) == FROZEN[sid]


@pytest.mark.parametrize("sid", SCHEMAS)
def test_instances_are_closed(sid):
    ins = instances(sid)
    assert ins
    for i in ins:
        assert not free_vars(i.formula), i.label
    assert len({i.label for i in ins}) == len(ins)


def test_instance_counts():
    assert len(instances("indep:P")) == 1 + 1 + 8
    assert len(instances("equiv:D")) == 1 + 1 + 2
    assert len(instances("equiv:F")) == len(BATTERY) == 12
    # splits with |y| >= 1 for each frame length
    expected = sum({1: 1, 2: 3, 3: 6}[e.arity] for e in BATTERY)
    assert len(instances(EXISTENCE)) == expected


def test_length_zero_is_degenerate_but_valid():
    sig = uniform({"A": 2})
    for sid in ("equiv:A", "equiv:C", "indep:A", "indep:D", "indep:Z"):
        f = instantiate_schema(sid, 0)
        assert quantifier_depth(f) <= 1
        assert valid(f, sig, engine="auto").valid


def test_schema_errors():
    with pytest.raises(SchemaError):
        instantiate_schema("equiv:Q", 1)
    with pytest.raises(SchemaError):
        instantiate_schema("equiv:F", 1)
    with pytest.raises(SchemaError):
        instantiate_schema("indep:P", 1, perms=[(0,)])
    with pytest.raises(SchemaError):
        instantiate_schema("equiv:A", -1)


def test_battery_frames():
    for name, f, frame in battery("N"):
        assert {v.sort for v in frame} == {"N"}
        assert free_vars(f) <= set(frame), name


def test_classical_battery_named_and_closed():
    cb = classical_battery()
    assert len(cb) == 20
    assert all(not free_vars(f) for _, f in cb)
