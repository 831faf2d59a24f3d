"""Concrete syntax for formulas and formula documents.

    formula  := quant | impl
    quant    := ("forall" | "exists") binder {"," binder} "." formula
    binder   := IDENT ":" IDENT
    impl     := disj ["->" formula]
    disj     := conj {"or" conj}
    conj     := unary {"and" unary}
    unary    := "not" unary | quant | atom | "(" formula ")"
    atom     := "eq" "(" var "," var ")"
              | "equiv" "(" vlist ";" vlist ")"
              | "indep" "(" vlist ";" vlist ["|" vlist] ")"
              | IDENT "(" vlist ")"
    vlist    := [group {"," group}]          group := var | "(" vlist ")"

Quantifier bodies extend as far right as possible.  A document is a
sequence of declarations and formulas:

    sort A = {a, b, c}      sort B = 3      sort N = names 1
    rel R(A, B) = box {(a, 0), (b, 1)}
    var x, y : A
    forall x:A. equiv(x ; x)

``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .multiteam import SortValueSet
from .signature import NameSort, RelDecl, Signature
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
    SortError,
    Var,
    check_sorts,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.reason = message


KEYWORDS = {"forall", "exists", "and", "or", "not", "eq", "equiv", "indep", "sort", "rel", "var", "box", "diamond", "names"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:′)*)
  | (?P<punct>[(),;|:.{}=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, punct, arrow, kw, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Document:
    signature: Signature
    formulas: list[Formula] = field(default_factory=list)
    context: dict[str, str] = field(default_factory=dict)
    positions: list[tuple[int, int]] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str, signature: Signature | None, context: dict[str, str] | None, default_sort: str | None):
        self.toks = tokenize(text)
        self.i = 0
        self.signature = signature if signature is not None else Signature()
        self.context = dict(context or {})
        self.default_sort = default_sort
        self.scopes: list[dict[str, str]] = []
        self.unresolved: dict[str, Token] = {}
        self.links: list[tuple[str, str, Token]] = []  # (left, right, where) for sort unification

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "kw", "arrow")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(message, t.line, t.col)

    def ident(self, what: str) -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    # -- formulas

    def formula(self) -> Formula:
        if self.tok.text in ("forall", "exists") and self.tok.kind == "kw":
            return self.quant()
        left = self.disj()
        if self.tok.kind == "arrow":
            self.advance()
            return Implies(left, self.formula())
        return left

    def quant(self) -> Formula:
        kw = self.advance().text
        binders: list[Var] = []
        while True:
            name = self.ident("a variable")
            self.expect(":")
            sort_tok = self.ident("a sort")
            if self.signature.sorts and sort_tok.text not in self.signature.sorts:
                raise SortError(f"{sort_tok.line}:{sort_tok.col}: unknown sort {sort_tok.text} for {name.text}", name.text)
            binders.append(Var(name.text, sort_tok.text))
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(".")
        self.scopes.append({v.name: v.sort for v in binders})
        try:
            body = self.formula()
        finally:
            self.scopes.pop()
        node = Forall if kw == "forall" else Exists
        for v in reversed(binders):
            body = node(v, body)
        return body

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("or"):
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("and"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "kw" and t.text == "not":
            self.advance()
            return Not(self.unary())
        if t.kind == "kw" and t.text in ("forall", "exists"):
            return self.quant()
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "kw" and t.text == "eq":
            self.advance()
            self.expect("(")
            x = self.var()
            self.expect(",")
            y = self.var()
            self.expect(")")
            self.link(x, y, t)
            return Eq(x, y)
        if t.kind == "kw" and t.text == "equiv":
            self.advance()
            self.expect("(")
            xs = self.vlist()
            self.expect(";")
            ys = self.vlist()
            self.expect(")")
            if len(xs) != len(ys):
                self.fail("equiv needs vectors of equal length", t)
            for a, b in zip(xs, ys):
                self.link(a, b, t)
            return Equiv(xs, ys)
        if t.kind == "kw" and t.text == "indep":
            self.advance()
            self.expect("(")
            xs = self.vlist()
            self.expect(";")
            ys = self.vlist()
            zs: tuple = ()
            if self.at("|"):
                self.advance()
                zs = self.vlist()
            self.expect(")")
            return Indep(xs, ys, zs)
        if t.kind == "ident":
            self.advance()
            if not self.at("("):
                self.fail(f"expected '(' after relation name {t.text}")
            self.advance()
            args = self.vlist()
            self.expect(")")
            decl = self.signature.relations.get(t.text)
            if decl is not None:
                if len(decl.sorts) != len(args):
                    self.fail(f"relation {t.text} takes {len(decl.sorts)} arguments", t)
                for v, s in zip(args, decl.sorts):
                    self.link_sort(v, s, t)
            return Rel(t.text, args)
        self.fail(f"expected a formula, found {t.text or 'end of input'!r}")

    def vlist(self) -> tuple[Var, ...]:
        out: list[Var] = []
        if self.at(")") or self.at(";") or self.at("|"):
            return ()
        while True:
            if self.at("("):
                self.advance()
                out.extend(self.vlist())
                self.expect(")")
            else:
                out.append(self.var())
            if self.at(","):
                self.advance()
                continue
            return tuple(out)

    def var(self) -> Var:
        t = self.ident("a variable")
        for scope in reversed(self.scopes):
            if t.text in scope:
                return Var(t.text, scope[t.text])
        if t.text in self.context:
            return Var(t.text, self.context[t.text])
        self.unresolved.setdefault(t.text, t)
        return Var(t.text, "")

    # -- sort inference for undeclared free variables

    def link(self, a: Var, b: Var, where: Token) -> None:
        self.links.append((_key(a), _key(b), where))

    def link_sort(self, a: Var, sort: str, where: Token) -> None:
        self.links.append((_key(a), "sort:" + sort, where))

    def resolve(self, f: Formula) -> Formula:
        if not self.unresolved:
            return f
        parent: dict[str, str] = {}

        def find(k: str) -> str:
            parent.setdefault(k, k)
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for a, b, where in self.links:
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            if ra.startswith("sort:") and rb.startswith("sort:"):
                bad = a if not a.startswith("sort:") else b
                name = bad.split(":", 1)[1]
                raise SortError(f"{where.line}:{where.col}: conflicting sorts {ra[5:]} and {rb[5:]} for {name}", name)
            if ra.startswith("sort:"):
                parent[rb] = ra
            else:
                parent[ra] = rb
        sorts: dict[str, str] = {}
        for name, tok in self.unresolved.items():
            root = find("free:" + name)
            if root.startswith("sort:"):
                sorts[name] = root[5:]
            elif self.default_sort is not None:
                sorts[name] = self.default_sort
            else:
                raise SortError(f"{tok.line}:{tok.col}: cannot infer the sort of free variable {name}", name)
        return _fill(f, sorts)


def _key(v: Var) -> str:
    return "free:" + v.name if v.sort == "" else "sort:" + v.sort


def _fill(f: Formula, sorts: dict[str, str]) -> Formula:
    def fix(v: Var) -> Var:
        return Var(v.name, sorts[v.name]) if v.sort == "" else v

    if isinstance(f, Eq):
        return Eq(fix(f.x), fix(f.y))
    if isinstance(f, Equiv):
        return Equiv(tuple(map(fix, f.xs)), tuple(map(fix, f.ys)))
    if isinstance(f, Indep):
        return Indep(tuple(map(fix, f.xs)), tuple(map(fix, f.ys)), tuple(map(fix, f.zs)))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(map(fix, f.args)))
    if isinstance(f, Not):
        return Not(_fill(f.body, sorts))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_fill(f.left, sorts), _fill(f.right, sorts))
    return type(f)(f.var, _fill(f.body, sorts))


def _default_sort(signature: Signature | None, default_sort: str | None) -> str | None:
    if default_sort is not None:
        return default_sort
    if signature is not None and len(signature.sorts) == 1:
        return next(iter(signature.sorts))
    return None


def parse(
    text: str,
    context: dict[str, str] | None = None,
    signature: Signature | None = None,
    default_sort: str | None = None,
) -> Formula:
    """Parse one formula.

    ``context`` gives sorts of free variables.  Other free variables get their
    sort from the atoms they occur in, then from ``default_sort``, then from
    the only sort of ``signature`` if it has exactly one.
    """
    p = _Parser(text, signature, context, _default_sort(signature, default_sort))
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after formula")
    f = p.resolve(f)
    check_sorts(f, signature.rel_arity() if signature and signature.relations else None)
    return f


def parse_document(
    text: str,
    signature: Signature | None = None,
    default_sort: str | None = None,
    context: dict[str, str] | None = None,
) -> Document:
    sig = Signature(dict(signature.sorts), dict(signature.relations)) if signature else Signature()
    doc = Document(sig)
    doc.context.update(context or {})
    p = _Parser(text, sig, doc.context, None)
    while p.tok.kind != "eof":
        if p.at(";"):
            p.advance()
            continue
        t = p.tok
        if t.kind == "kw" and t.text == "sort":
            _sort_decl(p, sig)
        elif t.kind == "kw" and t.text == "rel":
            _rel_decl(p, sig)
        elif t.kind == "kw" and t.text == "var":
            p.advance()
            names = [p.ident("a variable").text]
            while p.at(","):
                p.advance()
                names.append(p.ident("a variable").text)
            p.expect(":")
            s = p.ident("a sort")
            if s.text not in sig.sorts:
                raise SortError(f"{s.line}:{s.col}: unknown sort {s.text}", names[0])
            for n in names:
                doc.context[n] = s.text
                p.context[n] = s.text
        else:
            p.unresolved, p.links = {}, []
            p.default_sort = _default_sort(sig, default_sort)
            f = p.resolve(p.formula())
            check_sorts(f, sig.rel_arity() if sig.relations else None)
            doc.formulas.append(f)
            doc.positions.append((t.line, t.col))
    return doc


def _value(p: _Parser):
    t = p.advance()
    if t.kind == "int":
        return int(t.text)
    if t.kind in ("ident", "kw"):
        return t.text
    p.fail(f"expected a value, found {t.text!r}", t)


def _sort_decl(p: _Parser, sig: Signature) -> None:
    p.advance()
    name = p.ident("a sort name").text
    p.expect("=")
    if p.tok.kind == "int":
        n = int(p.advance().text)
        if n <= 0:
            p.fail("a sort needs at least one value")
        sig.sorts[name] = SortValueSet.of_size(name, n)
    elif p.at("names"):
        p.advance()
        if p.tok.kind != "int":
            p.fail("expected an arity after 'names'")
        sig.sorts[name] = NameSort(name, int(p.advance().text))
    else:
        p.expect("{")
        values = [] if p.at("}") else [_value(p)]
        while p.at(","):
            p.advance()
            values.append(_value(p))
        p.expect("}")
        if not values:
            p.fail("a sort needs at least one value")
        if len(set(values)) != len(values):
            p.fail(f"sort {name} repeats a value")
        sig.sorts[name] = SortValueSet(name, tuple(values))


def _rel_decl(p: _Parser, sig: Signature) -> None:
    p.advance()
    name = p.ident("a relation name").text
    p.expect("(")
    sorts = [p.ident("a sort").text]
    while p.at(","):
        p.advance()
        sorts.append(p.ident("a sort").text)
    p.expect(")")
    for s in sorts:
        if s not in sig.sorts:
            p.fail(f"unknown sort {s} in relation {name}")
    p.expect("=")
    if not (p.at("box") or p.at("diamond")):
        p.fail("expected 'box' or 'diamond'")
    kind = p.advance().text
    p.expect("{")
    tuples = []
    while not p.at("}"):
        if p.at("("):
            p.advance()
            row = [_value(p)]
            while p.at(","):
                p.advance()
                row.append(_value(p))
            p.expect(")")
        else:
            row = [_value(p)]
        if len(row) != len(sorts):
            p.fail(f"relation {name} has arity {len(sorts)}")
        for v, s in zip(row, sorts):
            if v not in sig.carrier(s).values:
                p.fail(f"value {v!r} is not in sort {s}")
        tuples.append(tuple(row))
        if p.at(","):
            p.advance()
    p.expect("}")
    sig.relations[name] = RelDecl(name, tuple(sorts), kind, frozenset(tuples))
