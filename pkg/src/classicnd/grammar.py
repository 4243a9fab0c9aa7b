"""Concrete ASCII syntax: tokenizer, recursive-descent parser, printer.

    Type  ::= OrT ("->" Type)?
    OrT   ::= AndT ("\\/" AndT)*
    AndT  ::= AtomT ("/\\" AtomT)*
    AtomT ::= ident | "bot" | "(" Type ")"
    Term  ::= Head EArg*
    Head  ::= ident | "\\" ident ":" Type "." Term | "<" Term "," Term ">"
            | "inl" "[" Type "]" Head | "inr" "[" Type "]" Head
            | "mu" ident ":" Type "." Term | "[" ident "]" Head | "(" Term ")"
    EArg  ::= Head | "p1" | "p2" | "case" "[" Type "]" "{" ident "." Term "|" ident "." Term "}"

Comments run from ``--`` to the end of the line.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .syntax import (
    BOT, PROJ1, PROJ2, RESERVED, And, App, Arg, Arrow, Case, ETerm, Inl, Inr,
    Lam, Mu, Named, Or, Pair, Proj, PropVar, Term, Type, Var,
)


class ParseError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnboundMuError(ParseError):
    pass


class Token(NamedTuple):
    kind: str  # "ident", "sym", "kw" or "eof"
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+|--[^\n]*)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_']*)"
    r"|(?P<sym>->|\\/|/\\|[\\:.<>,()\[\]{}|])"
)


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        if m.lastgroup == "ident":
            kind = "kw" if text in RESERVED else "ident"
            tokens.append(Token(kind, text, line, col))
        elif m.lastgroup == "sym":
            tokens.append(Token("sym", text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_HEAD_START = {"\\", "<", "(", "["}
_HEAD_KW = {"inl", "inr", "mu"}


class _Parser:
    def __init__(self, src: str, strict_mu: bool = False):
        self.toks = tokenize(src)
        self.i = 0
        self.strict_mu = strict_mu
        self.mu_scope: list[str] = []

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.value or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def expect(self, value: str) -> Token:
        tok = self.tok
        if tok.kind not in ("sym", "kw") or tok.value != value:
            self.fail(f"expected {value!r}")
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            self.fail("expected an identifier")
        self.i += 1
        return tok.value

    def at(self, value: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.value == value

    def end(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")

    # types

    def type_(self) -> Type:
        left = self.or_type()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def or_type(self) -> Type:
        t = self.and_type()
        while self.at("\\/"):
            self.i += 1
            t = Or(t, self.and_type())
        return t

    def and_type(self) -> Type:
        t = self.atom_type()
        while self.at("/\\"):
            self.i += 1
            t = And(t, self.atom_type())
        return t

    def atom_type(self) -> Type:
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return PropVar(tok.value)
        if self.at("bot"):
            self.i += 1
            return BOT
        if self.at("("):
            self.i += 1
            t = self.type_()
            self.expect(")")
            return t
        self.fail("expected a type")

    # terms

    def starts_head(self) -> bool:
        tok = self.tok
        return (tok.kind == "ident"
                or (tok.kind == "sym" and tok.value in _HEAD_START)
                or (tok.kind == "kw" and tok.value in _HEAD_KW))

    def starts_earg(self) -> bool:
        return self.starts_head() or (self.tok.kind == "kw" and self.tok.value in ("p1", "p2", "case"))

    def term(self) -> Term:
        t = self.head()
        while self.starts_earg():
            t = App(t, self.earg())
        return t

    def earg(self) -> ETerm:
        if self.at("p1"):
            self.i += 1
            return PROJ1
        if self.at("p2"):
            self.i += 1
            return PROJ2
        if self.at("case"):
            self.i += 1
            self.expect("[")
            ann = self.type_()
            self.expect("]")
            self.expect("{")
            x = self.ident()
            self.expect(".")
            left = self.term()
            self.expect("|")
            y = self.ident()
            self.expect(".")
            right = self.term()
            self.expect("}")
            return Case(ann, x, left, y, right)
        return Arg(self.head())

    def head(self) -> Term:
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.value)
        if self.at("\\"):
            self.i += 1
            x = self.ident()
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            return Lam(x, ann, self.term())
        if self.at("<"):
            self.i += 1
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            return Pair(a, b)
        if self.at("inl") or self.at("inr"):
            self.i += 1
            self.expect("[")
            other = self.type_()
            self.expect("]")
            body = self.head()
            return Inl(other, body) if tok.value == "inl" else Inr(other, body)
        if self.at("mu"):
            self.i += 1
            a = self.ident()
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            self.mu_scope.append(a)
            body = self.term()
            self.mu_scope.pop()
            return Mu(a, ann, body)
        if self.at("["):
            self.i += 1
            name_tok = self.tok
            a = self.ident()
            if self.strict_mu and a not in self.mu_scope:
                raise UnboundMuError(f"mu-name {a!r} is not bound", name_tok.line, name_tok.col)
            self.expect("]")
            return Named(a, self.head())
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        self.fail("expected a term")

    def context(self) -> dict[str, Type]:
        out: dict[str, Type] = {}
        if self.tok.kind == "eof":
            return out
        while True:
            tok = self.tok
            name = self.ident()
            if name in out:
                self.fail(f"duplicate declaration of {name!r}", tok)
            self.expect(":")
            out[name] = self.type_()
            if not self.at(","):
                return out
            self.i += 1


def parse_type(src: str) -> Type:
    p = _Parser(src)
    t = p.type_()
    p.end()
    return t


def parse_term(src: str, strict_mu: bool = False) -> Term:
    """Parse a term; with ``strict_mu`` every ``[a]`` needs an enclosing ``mu a``."""
    p = _Parser(src, strict_mu)
    t = p.term()
    p.end()
    return t


def parse_context(src: str) -> dict[str, Type]:
    """Parse ``"x:P, f:P -> Q"`` into an ordered mapping."""
    p = _Parser(src)
    ctx = p.context()
    p.end()
    return ctx


# ---------------------------------------------------------------------------
# Printing

_TOP, _HEAD, _ATOM = 0, 1, 2


def print_type(t: Type) -> str:
    return t.text


def print_term(t: Term) -> str:
    return _pt(t, _TOP)


def print_eterm(e: ETerm) -> str:
    match e:
        case Arg(t):
            return _pt(t, _ATOM)
        case Proj(i):
            return f"p{i}"
        case Case(ann, x, left, y, right):
            return f"case[{ann.text}]{{{x}. {_pt(left, _TOP)} | {y}. {_pt(right, _TOP)}}}"
    raise TypeError(f"not an E-term: {e!r}")


def print_seq(seq) -> str:
    return " ".join(print_eterm(e) for e in seq) if seq else "()"


def _pt(t: Term, ctx: int) -> str:
    match t:
        case Var(x):
            return x
        case Pair(a, b):
            return f"<{_pt(a, _TOP)}, {_pt(b, _TOP)}>"
        case Inl(other, body):
            return f"inl[{other.text}] {_pt(body, _ATOM)}"
        case Inr(other, body):
            return f"inr[{other.text}] {_pt(body, _ATOM)}"
        case Named(a, body):
            return f"[{a}] {_pt(body, _ATOM)}"
        case Lam(x, ann, body):
            s = f"\\{x}:{ann.text}. {_pt(body, _TOP)}"
        case Mu(a, ann, body):
            s = f"mu {a}:{ann.text}. {_pt(body, _TOP)}"
        case App(head, arg):
            s = f"{_pt(head, _HEAD)} {print_eterm(arg)}"
            return f"({s})" if ctx == _ATOM else s
        case _:
            raise TypeError(f"not a term: {t!r}")
    return s if ctx == _TOP else f"({s})"


def print_context(ctx: dict[str, Type]) -> str:
    return ", ".join(f"{k}:{v.text}" for k, v in ctx.items())
