"""Concrete syntax for `.3lqst` files.

A file is a header of sort declarations followed by a single assertion::

    # the powerset of X, restricted to singletons
    sort0 z1 z2;
    sort1 X Z;
    sort2 A;
    assert forall Z . Z in A <-> (forall z1 . z1 in Z -> z1 in X).

Connectives, loosest first: ``<->`` (left-assoc), ``->`` (right-assoc),
``|``, ``&``, ``~``.  A quantifier body extends as far right as possible.
The sort of a quantifier block is taken from the declared sort of its
variables.  ``exists`` is accepted and desugared to ``~ forall ~``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import Diagnostic, ParseError
from .syntax import (
    And,
    Atom,
    EnumEq,
    EnumMem,
    Eq0,
    Eq1,
    Forall0,
    Forall1,
    Formula,
    Iff,
    Implies,
    Mem01,
    Mem12,
    Not,
    Or,
    Sort,
    Var,
    all_variables,
    free_variables,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|[~&|=;.,{}()])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"sort0", "sort1", "sort2", "assert", "forall", "exists", "in"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError([Diagnostic("error", f"unexpected character {text[pos]!r}", line, pos - line_start + 1)])
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "op" or kind == "ident":
            tok = m.group()
            if kind == "ident" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass(frozen=True)
class ParsedFile:
    formula: Formula
    declarations: tuple[Var, ...]


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.decls: dict[str, Var] = {}
        self.order: list[Var] = []
        self.binders: list[tuple[Var, Token]] = []

    # -- helpers

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError([Diagnostic("error", msg, tok.line, tok.col)])

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "ident":
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def lookup(self, tok: Token) -> Var:
        if tok.kind != "ident":
            self.fail(f"expected an identifier, found {tok.text or 'end of input'!r}", tok)
        v = self.decls.get(tok.text)
        if v is None:
            self.fail(f"undeclared identifier {tok.text!r}", tok)
        return v

    # -- grammar

    def file(self) -> ParsedFile:
        while self.peek().kind == "kw" and self.peek().text.startswith("sort"):
            kw = self.next()
            sort = Sort(int(kw.text[-1]))
            if self.peek().kind != "ident":
                self.fail("declaration lists no variables")
            while self.peek().kind == "ident":
                t = self.next()
                prev = self.decls.get(t.text)
                if prev is not None and prev.sort != sort:
                    self.fail(f"{t.text!r} already declared with sort {int(prev.sort)}", t)
                if prev is None:
                    v = Var(t.text, sort)
                    self.decls[t.text] = v
                    self.order.append(v)
            self.expect(";")
        self.expect("assert")
        f = self.formula()
        self.expect(".")
        if self.peek().kind != "eof":
            self.fail(f"unexpected {self.peek().text!r} after the assertion")
        self.check_bound_free(f)
        return ParsedFile(f, tuple(self.order))

    def check_bound_free(self, f: Formula) -> None:
        free = free_variables(f).all()
        diags = [
            Diagnostic("error", f"variable {v.name!r} occurs both bound and free", t.line, t.col)
            for v, t in self.binders
            if v in free
        ]
        if diags:
            raise ParseError(diags)

    def formula(self) -> Formula:
        if self.peek().text in ("forall", "exists") and self.peek().kind == "kw":
            return self.quantified()
        return self.iff()

    def quantified(self) -> Formula:
        qt = self.next()
        vs = []
        while self.peek().kind == "ident":
            t = self.next()
            v = self.lookup(t)
            vs.append(v)
            self.binders.append((v, t))
        if not vs:
            self.fail("empty quantifier list")
        self.expect(".")
        body = self.formula()
        sorts = {v.sort for v in vs}
        if len(sorts) != 1:
            self.fail("quantifier block mixes sorts", qt)
        sort = sorts.pop()
        if sort == Sort.COLLECTION:
            self.fail("sort-2 variables cannot be quantified", qt)
        cls = Forall0 if sort == Sort.INDIVIDUAL else Forall1
        try:
            if qt.text == "exists":
                return Not(cls(tuple(vs), Not(body)))
            return cls(tuple(vs), body)
        except ValueError as e:
            self.fail(str(e), qt)

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek().text == "<->":
            self.next()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.next()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().text == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek().text == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "~":
            self.next()
            return Not(self.unary())
        if t.text in ("forall", "exists") and t.kind == "kw":
            return self.quantified()
        if t.text == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def term(self):
        t = self.peek()
        if t.text == "{":
            self.next()
            members = []
            if self.peek().text == "}":
                self.fail("finite enumeration must list at least one variable")
            while True:
                mt = self.next()
                v = self.lookup(mt)
                if v.sort != Sort.INDIVIDUAL:
                    self.fail(f"enumeration member {v.name!r} is not of sort 0", mt)
                members.append(v)
                if self.peek().text == ",":
                    self.next()
                    continue
                self.expect("}")
                return tuple(members), t
        return self.lookup(self.next()), t

    def atom(self) -> Atom:
        left, lt = self.term()
        op = self.peek()
        if op.text not in ("=", "in"):
            self.fail(f"expected '=' or 'in', found {op.text or 'end of input'!r}")
        self.next()
        right, rt = self.term()
        if op.text == "=":
            if isinstance(right, tuple) and isinstance(left, Var):
                left, right = right, left
            if isinstance(left, tuple):
                if isinstance(right, tuple) or right.sort != Sort.SET:
                    self.fail("an enumeration can only be equated to a sort-1 variable", op)
                return EnumEq(left, right)
            if left.sort != right.sort:
                self.fail(f"sort mismatch: {left.name} = {right.name}", op)
            if left.sort == Sort.INDIVIDUAL:
                return Eq0(left, right)
            if left.sort == Sort.SET:
                return Eq1(left, right)
            self.fail("equality between sort-2 variables is not part of the language", op)
        if isinstance(right, tuple):
            self.fail("the right side of 'in' must be a variable", rt)
        if isinstance(left, tuple):
            if right.sort != Sort.COLLECTION:
                self.fail("an enumeration can only be a member of a sort-2 variable", op)
            return EnumMem(left, right)
        if left.sort == Sort.INDIVIDUAL and right.sort == Sort.SET:
            return Mem01(left, right)
        if left.sort == Sort.SET and right.sort == Sort.COLLECTION:
            return Mem12(left, right)
        self.fail(f"sort mismatch: {left.name} in {right.name}", op)


def parse_file(text: str) -> ParsedFile:
    """Parse a complete `.3lqst` source. Raises ParseError on rejection."""
    return _Parser(text).file()


def parse(text: str) -> Formula:
    return parse_file(text).formula


# ----------------------------------------------------------------------------
# rendering

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _render_atom(a: Atom) -> str:
    if isinstance(a, (Eq0, Eq1)):
        return f"{a.left.name} = {a.right.name}"
    if isinstance(a, (Mem01, Mem12)):
        return f"{a.member.name} in {a.container.name}"
    if isinstance(a, EnumEq):
        return "{" + ", ".join(v.name for v in a.members) + "} = " + a.target.name
    if isinstance(a, EnumMem):
        return "{" + ", ".join(v.name for v in a.members) + "} in " + a.container.name
    raise TypeError(a)


def _r(f: Formula) -> str:
    if isinstance(f, Atom):
        return _render_atom(f)
    if isinstance(f, (Forall0, Forall1)):
        return "forall " + " ".join(v.name for v in f.vars) + " . " + _r(f.body)
    if isinstance(f, Not):
        inner = _r(f.body)
        if isinstance(f.body, (Atom, Not)):
            return "~" + inner
        return "~(" + inner + ")"
    p = _PREC[type(f)]
    left, right = _r(f.left), _r(f.right)
    lp = _PREC.get(type(f.left), 9)
    rp = _PREC.get(type(f.right), 9)
    # -> associates to the right, the others to the left
    if type(f) is Implies:
        wrap_l, wrap_r = lp <= p, rp < p
    else:
        wrap_l, wrap_r = lp < p, rp <= p
    if isinstance(f.left, (Forall0, Forall1)):
        wrap_l = True
    if isinstance(f.right, (Forall0, Forall1)):
        wrap_r = True
    if wrap_l:
        left = f"({left})"
    if wrap_r:
        right = f"({right})"
    return f"{left} {_SYM[type(f)]} {right}"


def render_formula(f: Formula) -> str:
    return _r(f)


def render(f: Formula, declarations=None) -> str:
    """Render a complete `.3lqst` file (declarations plus assertion)."""
    vs = list(declarations) if declarations is not None else []
    seen = {v for v in vs}
    for v in sorted(all_variables(f), key=lambda v: (v.sort, v.name)):
        if v not in seen:
            vs.append(v)
            seen.add(v)
    lines = []
    for s in Sort:
        names = [v.name for v in vs if v.sort == s]
        if names:
            lines.append(f"sort{int(s)} " + " ".join(names) + ";")
    lines.append("assert " + _r(f) + ".")
    return "\n".join(lines) + "\n"
