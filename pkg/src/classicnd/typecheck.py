"""Syntax-directed checking of the two-context sequent ``G |- t : A ; D``.

Four annotation sites (lambda parameter, the absent disjunct of an
injection, the mu result type and the case result type) make every rule
synthesize, so ``infer`` needs no unification.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .syntax import (
    BOT, And, App, Arg, Arrow, Case, ETerm, Inl, Inr, Lam, Mu, Named, Or, Pair,
    Proj, Seq, Term, Type, Var,
)

Path = tuple[int, ...]


class TypeCheckError(Exception):
    """A typing rule failed at ``path`` (child indices from the root)."""

    def __init__(self, rule: str, path: Path, message: str):
        self.rule = rule
        self.path = tuple(path)
        self.message = message
        where = ".".join(map(str, self.path)) or "root"
        super().__init__(f"[{rule}] at {where}: {message}")


class UnboundVariable(TypeCheckError):
    pass


class AnnotationMismatch(TypeCheckError):
    pass


class Mismatch(TypeCheckError):
    def __init__(self, expected: Type, actual: Type):
        self.expected = expected
        self.actual = actual
        super().__init__("check", (), f"expected {expected}, got {actual}")


class ElimMismatch(TypeCheckError):
    pass


@dataclass(frozen=True)
class Contexts:
    gamma: Mapping[str, Type] = field(default_factory=dict)
    delta: Mapping[str, Type] = field(default_factory=dict)

    def __str__(self):
        g = ", ".join(f"{k}:{v}" for k, v in self.gamma.items())
        d = ", ".join(f"{k}:{v}" for k, v in self.delta.items())
        return " ; ".join((g, d)).strip() if g or d else ""


EMPTY_CTX = Contexts()


@dataclass(frozen=True)
class Judgement:
    """A derivable sequent. Build these through ``check``."""

    ctx: Contexts
    term: Term
    type: Type

    def __str__(self):
        from .grammar import print_term
        ctx = str(self.ctx)
        return f"{ctx + ' ' if ctx else ''}|- {print_term(self.term)} : {self.type}"


def elim_type(t: Type, e: ETerm) -> Type:
    """Result type of eliminating a value of type ``t`` with ``e``."""
    match t, e:
        case Arrow(_, cod), Arg():
            return cod
        case And(left, _), Proj(1):
            return left
        case And(_, right), Proj(2):
            return right
        case Or(), Case(ann):
            return ann
    raise ElimMismatch("elim", (), f"cannot eliminate {t} with {type(e).__name__}")


def seq_type(t: Type, seq: Seq) -> Type:
    for e in seq:
        t = elim_type(t, e)
    return t


def infer(ctx: Contexts, t: Term) -> Type:
    return _infer(ctx.gamma, ctx.delta, t, ())


def check(ctx: Contexts, t: Term, expected: Type) -> Judgement:
    actual = infer(ctx, t)
    if actual != expected:
        raise Mismatch(expected, actual)
    return Judgement(ctx, t, actual)


def _infer(g: Mapping[str, Type], d: Mapping[str, Type], t: Term, path: Path) -> Type:
    match t:
        case Var(x):
            if x not in g:
                raise UnboundVariable("ax", path, f"unbound lambda-variable {x}")
            return g[x]
        case Lam(x, ann, body):
            return Arrow(ann, _infer({**g, x: ann}, d, body, path + (0,)))
        case Pair(a, b):
            return And(_infer(g, d, a, path + (0,)), _infer(g, d, b, path + (1,)))
        case Inl(other, body):
            return Or(_infer(g, d, body, path + (0,)), other)
        case Inr(other, body):
            return Or(other, _infer(g, d, body, path + (0,)))
        case Named(a, body):
            if a not in d:
                raise UnboundVariable("abs_i", path, f"unbound mu-variable {a}")
            actual = _infer(g, d, body, path + (0,))
            if actual != d[a]:
                raise AnnotationMismatch("abs_i", path, f"{a} expects {d[a]}, body has {actual}")
            return BOT
        case Mu(a, ann, body):
            actual = _infer(g, {**d, a: ann}, body, path + (0,))
            if actual != BOT:
                raise TypeCheckError("abs_e", path, f"mu body must have type bot, has {actual}")
            return ann
        case App(head, arg):
            h = _infer(g, d, head, path + (0,))
            return _infer_elim(g, d, h, arg, path)
    raise TypeError(f"not a term: {t!r}")


def _infer_elim(g, d, h: Type, arg: ETerm, path: Path) -> Type:
    match arg:
        case Arg(v):
            if not isinstance(h, Arrow):
                raise TypeCheckError("->e", path, f"applying a term of type {h}")
            actual = _infer(g, d, v, path + (1,))
            if actual != h.dom:
                raise TypeCheckError("->e", path + (1,), f"argument has type {actual}, expected {h.dom}")
            return h.cod
        case Proj(i):
            if not isinstance(h, And):
                raise TypeCheckError(f"/\\e{i}", path, f"projecting from a term of type {h}")
            return h.left if i == 1 else h.right
        case Case(ann, x, left, y, right):
            if not isinstance(h, Or):
                raise TypeCheckError("\\/e", path, f"case analysis on a term of type {h}")
            lt = _infer({**g, x: h.left}, d, left, path + (1,))
            if lt != ann:
                raise AnnotationMismatch("\\/e", path + (1,), f"branch has type {lt}, annotation says {ann}")
            rt = _infer({**g, y: h.right}, d, right, path + (2,))
            if rt != ann:
                raise AnnotationMismatch("\\/e", path + (2,), f"branch has type {rt}, annotation says {ann}")
            return ann
    raise TypeError(f"not an E-term: {arg!r}")


def is_typable(ctx: Contexts, t: Term) -> bool:
    try:
        infer(ctx, t)
    except TypeCheckError:
        return False
    return True


def typed_subterms(ctx: Contexts, t: Term) -> Iterator[tuple[Path, Contexts, Term, Type]]:
    """Every subterm of a typable ``t`` with its path, local contexts and type."""
    def go(g, d, s: Term, path: Path):
        yield path, Contexts(g, d), s, _infer(g, d, s, path)
        match s:
            case Lam(x, ann, body):
                yield from go({**g, x: ann}, d, body, path + (0,))
            case Pair(a, b):
                yield from go(g, d, a, path + (0,))
                yield from go(g, d, b, path + (1,))
            case Inl(_, body) | Inr(_, body) | Named(_, body):
                yield from go(g, d, body, path + (0,))
            case Mu(a, ann, body):
                yield from go(g, {**d, a: ann}, body, path + (0,))
            case App(head, arg):
                yield from go(g, d, head, path + (0,))
                match arg:
                    case Arg(v):
                        yield from go(g, d, v, path + (1,))
                    case Case(_, x, left, y, right):
                        h = _infer(g, d, head, path + (0,))
                        yield from go({**g, x: h.left}, d, left, path + (1,))
                        yield from go({**g, y: h.right}, d, right, path + (2,))

    yield from go(ctx.gamma, ctx.delta, t, ())
