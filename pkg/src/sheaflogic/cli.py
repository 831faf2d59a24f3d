"""Command line front end.

Exit codes: 0 all checks pass, 1 a check failed or the semantics diverged,
2 bad input, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

from .category import CheckResult
from .corpus import CorpusConfig, compare, generate, read_jsonl, write_jsonl
from .oracle import Assignment
from .parser import ParseError, parse, parse_document
from .schanuel import NameTuple, eval_nominal, nominal_signature, valid_nominal
from .schemas import SCHEMAS, SchemaError
from .signature import NameSort, RelDecl, Signature, uniform
from .syntax import Implies, SortError, to_text, universal_closure
from .teams import ResourceExceeded, Team, evaluate, explain, strip_universal_prefix, team_of_assignment, valid
from . import suites

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class RunConfig:
    model: str = "multiteam"
    sorts: dict[str, Any] = field(default_factory=dict)
    bound: int = 3
    max_sort: int = 4
    team_cap: int = 2 ** 12
    max_sample: int = 5
    witness_factor: int = 1
    jobs: int = 1
    seed: int = 0
    corpus_size: int = 500
    engine: str = "auto"
    timing: bool = False

    def __post_init__(self) -> None:
        if self.model not in ("multiteam", "schanuel"):
            raise ValueError(f"unknown model {self.model}")
        if self.engine not in ("auto", "sat", "enumerate"):
            raise ValueError(f"unknown engine {self.engine}")
        for name in ("bound", "max_sort", "team_cap", "max_sample", "witness_factor", "jobs", "corpus_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


class InputError(Exception):
    pass


# ------------------------------------------------------------ loading


def load_signature(path: str | None, cfg: RunConfig) -> Signature:
    if path is None:
        if cfg.sorts:
            sig = Signature.from_json(cfg.sorts)
        elif cfg.model == "schanuel":
            sig = nominal_signature()
        else:
            sig = Signature()
    else:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            sig = parse_document(text).signature
        else:
            sig = Signature.from_json({k: v for k, v in data.items() if k != "relations"})
            for r in data.get("relations", []):
                sig.relations[r["name"]] = RelDecl(r["name"], tuple(r["sorts"]), r["kind"], frozenset(tuple(t) for t in r["tuples"]))
    for name, c in sig.sorts.items():
        if not isinstance(c, NameSort) and c.size > cfg.max_sort:
            raise ResourceExceeded(f"sort {name} has {c.size} values, above the cap of {cfg.max_sort}")
    return sig


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc


# ------------------------------------------------------------ reporting


class Reporter:
    def __init__(self, out_path: str | None, timing: bool, stream=None):
        self.records: list[dict] = []
        self.out_path = out_path
        self.timing = timing
        self.stream = stream if stream is not None else sys.stdout

    def add(self, record: dict, line: str) -> None:
        self.records.append(record)
        print(line, file=self.stream)

    def check(self, r: CheckResult) -> None:
        self.add(r.to_json(self.timing), f"{r.status.upper():>17}  {r.name}")

    def close(self) -> None:
        if self.out_path:
            with open(self.out_path, "w", encoding="utf-8") as fh:
                for rec in self.records:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _exit_for(results: Sequence[CheckResult]) -> int:
    if any(not r.passed and not r.exceeded for r in results):
        return EXIT_FAIL
    if any(r.exceeded for r in results):
        return EXIT_RESOURCE
    return EXIT_OK


# ------------------------------------------------------------ commands


def _formulas(path: str, sig: Signature, context: dict[str, str] | None = None):
    text = Path(path).read_text(encoding="utf-8")
    doc = parse_document(text, sig, context=context)
    if not doc.formulas:
        raise InputError(f"{path}: no formulas")
    return doc


def cmd_eval(args, cfg: RunConfig, rep: Reporter) -> int:
    sig = load_signature(args.sorts, cfg)
    if args.exhaustive or not (args.team or args.assignment):
        doc = _formulas(args.formulas, sig)
        return _validity(doc, doc.signature, cfg, rep)
    data = _load_json(args.assignment or args.team)
    if cfg.model == "schanuel":
        world = int(data["world"])
        rho = {n: NameTuple(world, tuple(v["entries"] if isinstance(v, dict) else v)) for n, v in data["rho"].items()}
        context = {n: next(iter(sig.sorts), "N") for n in rho}
    elif args.assignment:
        context = {n: b["sort"] for n, b in data["rho"].items()}
    else:
        team = Team.from_json(data)
        context = dict(team.context)
    doc = _formulas(args.formulas, sig, context)
    sig = doc.signature
    if cfg.model == "multiteam" and args.assignment:
        rho = Assignment.from_json(data, sig)
        team = team_of_assignment(rho.sample, rho.bindings)
    results = []
    for f in doc.formulas:
        name = f"eval:{to_text(f)}"
        if cfg.model == "schanuel":
            value = eval_nominal(f, world, rho, sig)
            rec = CheckResult(name, value, 1, None if value else {"world": world, "rho": {n: t.to_json() for n, t in rho.items()}})
        else:
            team.check(sig)
            value = evaluate(f, team, sig)
            cex = None if value else {"team": team.to_json(sig), "trace": explain(f, team, sig)}
            rec = CheckResult(name, value, 1, cex)
        rep.check(rec)
        results.append(rec)
    return _exit_for(results)


def _validity(doc, sig: Signature, cfg: RunConfig, rep: Reporter) -> int:
    results = []
    for f in doc.formulas:
        closed = universal_closure(f)
        name = f"valid:{to_text(closed)}"
        try:
            if cfg.model == "schanuel":
                ok, world = valid_nominal(closed, cfg.bound, sig)
                r = CheckResult(name, ok, cfg.bound + 1, None if ok else {"world": world}, detail="nominal")
            else:
                v = valid(closed, sig, cap=cfg.team_cap, engine=cfg.engine)
                cex = None
                if v.countermodel is not None:
                    cex = {"team": v.countermodel.to_json(sig), "trace": explain(_body(closed), v.countermodel, sig)}
                r = CheckResult(name, v.valid, v.checked, cex, detail=v.engine)
        except ResourceExceeded as exc:
            r = CheckResult(name, False, 0, None, detail=str(exc), exceeded=True)
        rep.check(r)
        results.append(r)
    return _exit_for(results)


def _body(f):
    return strip_universal_prefix(f)[1]


def cmd_check(args, cfg: RunConfig, rep: Reporter) -> int:
    sig = load_signature(args.sorts, cfg)
    doc = _formulas(args.formulas, sig)
    return _validity(doc, doc.signature, cfg, rep)


def cmd_axioms(args, cfg: RunConfig, rep: Reporter) -> int:
    schemas = args.schema or list(SCHEMAS)
    for s in schemas:
        if s not in SCHEMAS:
            raise InputError(f"unknown schema {s}; known: {', '.join(SCHEMAS)}")
    lengths = tuple(range(args.max_length + 1))
    if cfg.model == "multiteam":
        sizes = tuple(args.size) if args.size else tuple(k for k in (2, 3) if k <= cfg.bound) or (cfg.bound,)
        for k in sizes:
            if k > cfg.max_sort:
                raise ResourceExceeded(f"sort size {k} is above the cap of {cfg.max_sort}")
        tasks = suites.axiom_tasks("multiteam", sizes, lengths, schemas=schemas, engine=cfg.engine, cap=cfg.team_cap)
    else:
        tasks = suites.axiom_tasks("schanuel", lengths=lengths, worlds=cfg.bound, schemas=schemas)
    results = suites.run_tasks(tasks, cfg.jobs)
    results.append(suites.negative_control(2))
    for r in results:
        rep.check(r)
    return _exit_for(results)


def cmd_oracle_diff(args, cfg: RunConfig, rep: Reporter) -> int:
    if args.corpus:
        entries = read_jsonl(args.corpus)
        label = f"oracle-diff[{args.mode},x{cfg.witness_factor}]@{Path(args.corpus).name}"
    else:
        if args.max_sample > cfg.max_sample:
            raise ResourceExceeded(f"sample size {args.max_sample} is above the cap of {cfg.max_sample}")
        ccfg = CorpusConfig(size=cfg.corpus_size, seed=cfg.seed, max_sample=args.max_sample, max_sort=min(3, cfg.max_sort),
                            quantifier_free=args.quantifier_free, mode=args.mode, bound_factor=cfg.witness_factor)
        entries = list(generate(ccfg))
        if args.write_corpus:
            write_jsonl(entries, args.write_corpus)
        label = f"oracle-diff[{args.mode},x{cfg.witness_factor}]@seed={cfg.seed},n={cfg.corpus_size}"
    try:
        n, divergences = compare(entries, mode=args.mode, bound_factor=cfg.witness_factor)
        r = CheckResult(label, not divergences, n, [d.__dict__ for d in divergences] or None)
    except ResourceExceeded as exc:
        r = CheckResult(label, False, 0, None, detail=str(exc), exceeded=True)
    rep.check(r)
    return _exit_for([r])


def cmd_category(args, cfg: RunConfig, rep: Reporter) -> int:
    results = suites.category_suite(cfg.bound)
    for r in results:
        rep.check(r)
    return _exit_for(results)


def cmd_search(args, cfg: RunConfig, rep: Reporter) -> int:
    sig = load_signature(args.sorts, cfg) if args.sorts else uniform({"A": min(cfg.bound, cfg.max_sort)})
    f = universal_closure(parse(args.implication, signature=sig, default_sort="A" if "A" in sig.sorts else None))
    if not isinstance(_body(f), Implies):
        raise InputError("search expects an implication")
    name = f"search:{to_text(f)}"
    try:
        v = valid(f, sig, cap=cfg.team_cap, engine=cfg.engine)
        cex = None if v.valid else {"team": v.countermodel.to_json(sig), "trace": explain(_body(f), v.countermodel, sig)}
        r = CheckResult(name, v.valid, v.checked, cex, detail="no countermodel" if v.valid else "countermodel found")
    except ResourceExceeded as exc:
        r = CheckResult(name, False, 0, None, detail=str(exc), exceeded=True)
    rep.check(r)
    return _exit_for([r])


# ------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=["multiteam", "schanuel"])
    common.add_argument("--sorts", help="sort declarations: a document or JSON")
    common.add_argument("--bound", type=int, help="sort size, world size or category bound")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--engine", choices=["auto", "sat", "enumerate"])
    common.add_argument("--json", dest="json_out", help="write the report as JSON lines")
    common.add_argument("--config", help="JSON file mirroring RunConfig")
    common.add_argument("--timing", action="store_true", default=None, help="include wall times in the report")

    ap = argparse.ArgumentParser(prog="sheaflogic", description="Verification workbench for atomic sheaf logic.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate formulas at a team or assignment")
    p.add_argument("formulas")
    p.add_argument("--team")
    p.add_argument("--assignment")
    p.add_argument("--exhaustive", action="store_true", help="check validity over all teams instead")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("check", parents=[common], help="check validity of every formula in a file")
    p.add_argument("formulas")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("axioms", parents=[common], help="run the equivalence and independence axiom suites")
    p.add_argument("--schema", action="append", help="restrict to a schema id (repeatable)")
    p.add_argument("--size", type=int, action="append", help="sort size for the multiteam model (repeatable)")
    p.add_argument("--max-length", type=int, default=2)
    p.set_defaults(fn=cmd_axioms)

    p = sub.add_parser("oracle-diff", parents=[common], help="compare the team evaluator with the forcing oracle")
    p.add_argument("--corpus", help="read a JSON lines corpus instead of generating one")
    p.add_argument("--write-corpus")
    p.add_argument("--size", type=int, dest="corpus_size")
    p.add_argument("--mode", choices=["canonical", "literal"], default="canonical")
    p.add_argument("--witness-factor", type=int)
    p.add_argument("--max-sample", type=int, default=3)
    p.add_argument("--quantifier-free", action="store_true")
    p.set_defaults(fn=cmd_oracle_diff)

    p = sub.add_parser("category", parents=[common], help="run the independent-pullback suites")
    p.set_defaults(fn=cmd_category)

    p = sub.add_parser("search", parents=[common], help="search teams for a countermodel to an implication")
    p.add_argument("implication")
    p.set_defaults(fn=cmd_search)
    return ap


def _config(args) -> RunConfig:
    data: dict = {}
    if args.config:
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
    for key in ("model", "bound", "seed", "jobs", "engine", "timing", "corpus_size", "witness_factor"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return RunConfig.from_json(data)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _config(args)
        rep = Reporter(args.json_out, cfg.timing)
        code = args.fn(args, cfg, rep)
        rep.close()
        return code
    except ResourceExceeded as exc:
        print(f"resource exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, ParseError, SortError, SchemaError, ValueError, KeyError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
