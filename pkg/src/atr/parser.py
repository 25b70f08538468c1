"""Concrete syntax reader for programs, terms and types.  Grammar: docs/grammar.md."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError
from .labels import parse_label
from .syntax import (
    OPS, App, Const, Crec, Down, Fix, If, Lam, Let, LetRec, Op, Prn, Term, Var, desugar, subst,
)
from .types import Arrow, AtrType, Base

REDEFINABLE = {"prn", "fix"}

KEYWORDS = {
    "lam", "lamr", "if", "then", "else", "let", "letrec", "in", "down", "prn", "fix",
    "crec", "eps", "def", "assume", "dialect", *OPS,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?:\#|--)[^\n]*)
  | (?P<type>N(?:@[A-Za-z0-9]+|\[(?:eps|e|ε|(?:\[\]|<>|□|◇)*)\])?(?![A-Za-z0-9_'%]))
  | (?P<string>"[01]*")
  | (?P<arrow>->|→)
  | (?P<lam>λ)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'%]*)
  | (?P<sym>[().:=;,])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                if kind == "ident" and s in KEYWORDS:
                    kind = "kw"
                elif kind == "lam":
                    kind, s = "kw", "lam"
                toks.append(Token(kind, s, line, col))
            col += len(s)
        i = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


@dataclass
class Program:
    dialect: Optional[str] = None
    assumptions: list = field(default_factory=list)
    declarations: list = field(default_factory=list)

    @property
    def main_name(self) -> str:
        names = [d[0] for d in self.declarations]
        return "main" if "main" in names else names[-1]

    @property
    def main(self) -> Term:
        return self.resolved(self.main_name)

    def declared_type(self, name: str) -> AtrType:
        for n, ty, _ in self.declarations:
            if n == name:
                return ty
        raise KeyError(name)

    @property
    def context(self) -> dict:
        return dict(self.assumptions)

    def resolved(self, name: str) -> Term:
        """Desugared body of ``name`` with earlier declarations inlined."""
        done = {}
        for n, _, t in self.declarations:
            body = desugar(t)
            for m, v in done.items():
                body = subst(body, m, v)
            done[n] = body
            if n == name:
                return body
        raise KeyError(name)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        # names bound by `def`; `prn` and `fix` may be redefined as ordinary functions
        self.defined = set()

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str):
        t = self.tok
        where = "EOF" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg} (at {where})", t.line, t.col)

    def at(self, text: str, kind: Optional[str] = None) -> bool:
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else ("kw", "sym", "arrow"))

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, definable: bool = False) -> str:
        redefined = definable and self.tok.kind == "kw" and self.tok.text in REDEFINABLE
        if self.tok.kind != "ident" and not redefined:
            self.error("expected identifier")
        t = self.tok
        self.i += 1
        return t.text

    # types
    def type(self) -> AtrType:
        left = self.type_atom()
        if self.tok.kind == "arrow":
            self.i += 1
            right = self.type()
            return Arrow((left,), right)
        return left

    def type_atom(self) -> AtrType:
        t = self.tok
        if t.kind == "type":
            self.i += 1
            s = t.text
            if s == "N":
                return Base(parse_label("e"))
            try:
                return Base(parse_label(s[2:] if s[1] == "@" else s[2:-1]))
            except ValueError as exc:
                raise ParseError(str(exc), t.line, t.col) from None
        if self.at("("):
            self.i += 1
            ty = self.type()
            self.eat(")")
            return ty
        self.error("expected a type")

    # terms
    def term(self) -> Term:
        t = self.tok
        pos = (t.line, t.col)
        if self.at("lam"):
            self.i += 1
            binders = self.binders()
            self.eat(".")
            body = self.term()
            for name, ty in reversed(binders):
                body = Lam(name, ty, body, pos)
            return body
        if self.at("if"):
            self.i += 1
            a = self.term()
            self.eat("then")
            b = self.term()
            self.eat("else")
            c = self.term()
            return If(a, b, c, pos)
        if self.at("let") or self.at("letrec"):
            rec = self.tok.text == "letrec"
            self.i += 1
            name = self.ident()
            ty = None
            if self.at(":"):
                self.i += 1
                ty = self.type()
            elif rec:
                self.error("letrec needs a type annotation")
            self.eat("=")
            bound = self.term()
            self.eat("in")
            body = self.term()
            return (LetRec if rec else Let)(name, ty, bound, body, pos)
        return self.application()

    def binders(self) -> list:
        out = []
        if self.tok.kind == "ident":
            name = self.ident()
            self.eat(":")
            return [(name, self.type_atom())]
        while self.at("("):
            self.i += 1
            names = [self.ident()]
            while self.tok.kind == "ident":
                names.append(self.ident())
            self.eat(":")
            ty = self.type()
            self.eat(")")
            out.extend((n, ty) for n in names)
        if not out:
            self.error("expected an annotated binder '(x : TYPE)'")
        return out

    def application(self) -> Term:
        t = self.tok
        pos = (t.line, t.col)
        head = self.primary()
        while self.starts_atom():
            head = App(head, self.atom(), pos)
        return head

    def primary(self) -> Term:
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "kw" and t.text in OPS:
            self.i += 1
            return Op(t.text, self.atom(), pos)
        if self.at("down"):
            self.i += 1
            a = self.atom()
            return Down(a, self.atom(), pos)
        if t.kind == "kw" and t.text in self.defined:
            self.i += 1
            return Var(t.text, pos)
        if self.at("prn"):
            self.i += 1
            return Prn(self.atom(), pos)
        if self.at("fix"):
            self.i += 1
            return Fix(self.atom(), pos)
        if self.at("crec"):
            self.i += 1
            if self.tok.kind != "string":
                self.error("crec expects a quoted clock constant")
            clock = self.tok.text[1:-1]
            self.i += 1
            self.eat("(")
            self.eat("lamr")
            self.eat("(")
            f = self.ident()
            self.eat(":")
            fty = self.type()
            self.eat(")")
            self.eat(".")
            body = self.term()
            self.eat(")")
            return Crec(clock, f, fty, body, pos)
        return self.atom()

    def starts_atom(self) -> bool:
        t = self.tok
        return (t.kind in ("ident", "string") or self.at("eps") or self.at("(")
                or (t.kind == "kw" and t.text in self.defined))

    def atom(self) -> Term:
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "ident" or (t.kind == "kw" and t.text in self.defined):
            self.i += 1
            return Var(t.text, pos)
        if t.kind == "string":
            self.i += 1
            return Const(t.text[1:-1], pos)
        if self.at("eps"):
            self.i += 1
            return Const("", pos)
        if self.at("("):
            self.i += 1
            e = self.term()
            self.eat(")")
            return e
        self.error("expected a term")

    def program(self) -> Program:
        prog = Program()
        while self.tok.kind != "eof":
            if self.at("dialect"):
                self.i += 1
                prog.dialect = self.ident()
            elif self.at("assume"):
                self.i += 1
                name = self.ident()
                self.eat(":")
                prog.assumptions.append((name, self.type()))
            elif self.at("def"):
                self.i += 1
                name = self.ident(definable=True)
                self.eat(":")
                ty = self.type()
                self.eat("=")
                prog.declarations.append((name, ty, self.term()))
                self.defined.add(name)
            else:
                self.error("expected 'def', 'assume' or 'dialect'")
            self.eat(";")
        if not prog.declarations:
            self.error("program has no declarations")
        return prog


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return t


def parse_type(text: str) -> AtrType:
    p = _Parser(text)
    t = p.type()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return t
