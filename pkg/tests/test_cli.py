from __future__ import annotations

import json

import pytest

from sheaflogic.cli import RunConfig, main


@pytest.fixture
def files(tmp_path):
    def write(name: str, content) -> str:
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
        return str(path)

    return write


SORTS = {"A": 2, "B": 2}
DIAG = {"context": [["x", "A"], ["y", "A"]], "rows": [[0, 0], [1, 1]]}


def records(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh]


def test_eval_team(files, capsys):
    sorts, team = files("sorts.json", SORTS), files("team.json", DIAG)
    assert main(["eval", files("f.txt", "indep(x ; y |)"), "--sorts", sorts, "--team", team]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert main(["eval", files("g.txt", "eq(x, x)"), "--sorts", sorts, "--team", team]) == 0


def test_eval_assignment(files):
    rho = {"omega": 3, "rho": {"x": {"sort": "A", "values": [0, 1, 0]}}}
    f = files("f.txt", "exists y:A. equiv(x ; y) and not eq(x, y)")
    assert main(["eval", f, "--sorts", files("s.json", SORTS), "--assignment", files("r.json", rho)]) == 0


def test_eval_exhaustive_axiom(files):
    f = files("ax.txt", "forall x:A, y:A, z:A. equiv(x ; y) and equiv(y ; z) -> equiv(x ; z)")
    assert main(["eval", f, "--sorts", files("s.json", SORTS), "--exhaustive"]) == 0


def test_eval_nominal(files):
    f = files("f.txt", "exists y:N. not eq(x, y)")
    rho = files("r.json", {"world": 1, "rho": {"x": [0]}})
    assert main(["eval", f, "--model", "schanuel", "--assignment", rho]) == 0


def test_check_document_with_declarations(files, tmp_path):
    doc = files("d.txt", "sort A = 2\nsort B = {p, q}\nforall x:A. forall y:B. indep(x ; y |)\nforall x:A. equiv(x ; x)\n")
    out = tmp_path / "r.jsonl"
    assert main(["check", doc, "--json", str(out)]) == 1
    recs = records(out)
    assert [r["status"] for r in recs] == ["fail", "pass"]
    assert recs[0]["countermodel"]["team"]["rows"] == [[0, "p"], [1, "q"]]


def test_axioms_subset(tmp_path):
    out = tmp_path / "ax.jsonl"
    assert main(["axioms", "--schema", "equiv:A", "--schema", "indep:A", "--size", "2", "--json", str(out)]) == 0
    recs = records(out)
    assert recs[-1]["name"].startswith("multiteam:negative-control")
    assert all(r["status"] == "pass" for r in recs)
    assert {r["name"].split("[")[0] for r in recs[:-1]} == {"multiteam:equiv:A", "multiteam:indep:A"}


def test_axioms_schanuel():
    assert main(["axioms", "--model", "schanuel", "--schema", "indep:B", "--bound", "2"]) == 0


def test_category_small(tmp_path):
    out = tmp_path / "c.jsonl"
    assert main(["category", "--bound", "2", "--json", str(out)]) == 0
    assert len(records(out)) == 17


@pytest.mark.parametrize(
    "implication, code",
    [
        ("indep(x ; y | z) and indep(x ; z |) -> indep(x ; (y, z) |)", 0),
        ("indep(x ; y |) -> eq(x, y)", 1),
        ("equiv(x ; y) -> equiv(y ; x)", 0),
    ],
)
def test_search(implication, code):
    assert main(["search", implication, "--bound", "2"]) == code


def test_search_needs_implication():
    assert main(["search", "eq(x, x)"]) == 2


def test_oracle_diff_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["oracle-diff", "--size", "60", "--seed", "3", "--json", str(a)]) == 0
    assert main(["oracle-diff", "--size", "60", "--seed", "3", "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "wall_time" not in records(a)[0]


def test_oracle_diff_corpus_round_trip(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    assert main(["oracle-diff", "--size", "30", "--write-corpus", str(corpus)]) == 0
    assert main(["oracle-diff", "--corpus", str(corpus), "--mode", "literal"]) == 0
    assert main(["oracle-diff", "--size", "40", "--quantifier-free", "--witness-factor", "2"]) == 0


def test_timing_flag(tmp_path):
    out = tmp_path / "t.jsonl"
    assert main(["category", "--bound", "1", "--timing", "--json", str(out)]) == 0
    assert all("wall_time" in r for r in records(out))


def test_input_errors(files, tmp_path):
    sorts = files("s.json", SORTS)
    assert main(["check", str(tmp_path / "missing.txt")]) == 2
    assert main(["check", files("bad.txt", "eq(x,"), "--sorts", sorts]) == 2
    assert main(["axioms", "--schema", "equiv:Q"]) == 2
    assert main(["category", "--config", files("c.json", {"bogus": 1})]) == 2
    assert main(["eval", files("f.txt", "eq(x, x)"), "--sorts", sorts, "--team", files("t.json", "{not json")]) == 2
    assert main(["eval", files("g.txt", "eq(x, x)"), "--sorts", sorts, "--team", files("u.json", {"context": [["x", "A"]], "rows": [[7]]})]) == 2


def test_resource_exceeded(files):
    assert main(["check", files("f.txt", "eq(x, x)"), "--sorts", files("big.json", {"A": 9})]) == 3
    cfg = files("cap.json", {"team_cap": 10, "engine": "enumerate"})
    f = files("g.txt", "forall x:A, y:A. eq(x, x)")
    assert main(["check", f, "--sorts", files("s.json", {"A": 3}), "--config", cfg]) == 3


def test_failure_takes_precedence_over_resource(files):
    cfg = files("cap.json", {"team_cap": 20, "engine": "enumerate"})
    doc = files("d.txt", "forall x:A, y:A. eq(x, y)\nforall x:A, y:A, z:A. eq(x, x)\n")
    assert main(["check", doc, "--sorts", files("s.json", {"A": 2}), "--config", cfg]) == 1


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(model="other")
    with pytest.raises(ValueError):
        RunConfig(bound=0)
    with pytest.raises(ValueError):
        RunConfig.from_json({"bogus": 1})
    assert RunConfig.from_json({"seed": 4}).seed == 4


def test_parallel_report_matches_serial(tmp_path):
    a, b = tmp_path / "serial.jsonl", tmp_path / "parallel.jsonl"
    args = ["axioms", "--schema", "indep:P", "--schema", "equiv:G", "--size", "2"]
    assert main(args + ["--json", str(a)]) == 0
    assert main(args + ["--jobs", "2", "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
