"""Proof terms of classical natural deduction with bottom, ->, /\\ and \\/.

Terms use a named representation. Every node caches its free lambda-names
(``fv``), free mu-names (``fmv``) and its AST size, so substitutions can skip
subtrees that do not mention the substituted name. Nodes are treated as
immutable; equality is structural (names included), ``alpha_eq`` is the
equality to use when bound names may differ.
"""
from __future__ import annotations

from typing import Callable, Iterable, Sequence

EMPTY: frozenset[str] = frozenset()
RESERVED = frozenset({"bot", "mu", "inl", "inr", "case", "p1", "p2"})


def _union(a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
    if not b or a is b:
        return a
    if not a:
        return b
    return a | b


def _without(s: frozenset[str], name: str) -> frozenset[str]:
    return s - {name} if name in s else s


# ---------------------------------------------------------------------------
# Types


class Type:
    """A propositional formula. ``text`` is the canonical printed form."""

    __slots__ = ("text", "level", "size")

    def __eq__(self, other):
        return self is other or (isinstance(other, Type) and self.text == other.text)

    def __hash__(self):
        return hash(self.text)

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"Type({self.text!r})"

    def wrapped(self, level: int) -> str:
        return self.text if self.level >= level else f"({self.text})"


class PropVar(Type):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.text = name
        self.level = 3
        self.size = 1


class Bottom(Type):
    __slots__ = ()
    __match_args__ = ()

    def __init__(self):
        self.text = "bot"
        self.level = 3
        self.size = 1


class Arrow(Type):
    __slots__ = ("dom", "cod")
    __match_args__ = ("dom", "cod")

    def __init__(self, dom: Type, cod: Type):
        self.dom = dom
        self.cod = cod
        self.text = f"{dom.wrapped(1)} -> {cod.wrapped(0)}"
        self.level = 0
        self.size = 1 + dom.size + cod.size


class And(Type):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __init__(self, left: Type, right: Type):
        self.left = left
        self.right = right
        self.text = f"{left.wrapped(2)} /\\ {right.wrapped(3)}"
        self.level = 2
        self.size = 1 + left.size + right.size


class Or(Type):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __init__(self, left: Type, right: Type):
        self.left = left
        self.right = right
        self.text = f"{left.wrapped(1)} \\/ {right.wrapped(2)}"
        self.level = 1
        self.size = 1 + left.size + right.size


BOT = Bottom()


def subformulas(t: Type) -> list[Type]:
    out: list[Type] = []

    def go(s: Type):
        match s:
            case Arrow(a, b) | And(a, b) | Or(a, b):
                go(a)
                go(b)
        if s not in out:
            out.append(s)

    go(t)
    return out


# ---------------------------------------------------------------------------
# Terms and E-terms


class _Node:
    __slots__ = ("fv", "fmv", "size", "_hash", "_key")
    _fields: tuple[str, ...] = ()

    def _values(self):
        return tuple(getattr(self, f) for f in self._fields)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._values() == other._values()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((type(self).__name__, self._values()))
        return h

    def __repr__(self):
        args = ", ".join(repr(v) for v in self._values())
        return f"{type(self).__name__}({args})"


class Term(_Node):
    __slots__ = ()


class ETerm(_Node):
    __slots__ = ()


class Var(Term):
    __slots__ = ("name",)
    __match_args__ = _fields = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.fv = frozenset((name,))
        self.fmv = EMPTY
        self.size = 1
        self._hash = None
        self._key = None


class Lam(Term):
    __slots__ = ("var", "ann", "body")
    __match_args__ = _fields = ("var", "ann", "body")

    def __init__(self, var: str, ann: Type, body: Term):
        self.var = var
        self.ann = ann
        self.body = body
        self.fv = _without(body.fv, var)
        self.fmv = body.fmv
        self.size = 1 + ann.size + body.size
        self._hash = None
        self._key = None


class App(Term):
    __slots__ = ("head", "arg")
    __match_args__ = _fields = ("head", "arg")

    def __init__(self, head: Term, arg: ETerm):
        self.head = head
        self.arg = arg
        self.fv = _union(head.fv, arg.fv)
        self.fmv = _union(head.fmv, arg.fmv)
        self.size = 1 + head.size + arg.size
        self._hash = None
        self._key = None


class Pair(Term):
    __slots__ = ("fst", "snd")
    __match_args__ = _fields = ("fst", "snd")

    def __init__(self, fst: Term, snd: Term):
        self.fst = fst
        self.snd = snd
        self.fv = _union(fst.fv, snd.fv)
        self.fmv = _union(fst.fmv, snd.fmv)
        self.size = 1 + fst.size + snd.size
        self._hash = None
        self._key = None


class Inl(Term):
    """Left injection; ``other`` is the type of the absent right disjunct."""

    __slots__ = ("other", "body")
    __match_args__ = _fields = ("other", "body")

    def __init__(self, other: Type, body: Term):
        self.other = other
        self.body = body
        self.fv = body.fv
        self.fmv = body.fmv
        self.size = 1 + other.size + body.size
        self._hash = None
        self._key = None


class Inr(Term):
    """Right injection; ``other`` is the type of the absent left disjunct."""

    __slots__ = ("other", "body")
    __match_args__ = _fields = ("other", "body")

    def __init__(self, other: Type, body: Term):
        self.other = other
        self.body = body
        self.fv = body.fv
        self.fmv = body.fmv
        self.size = 1 + other.size + body.size
        self._hash = None
        self._key = None


class Mu(Term):
    __slots__ = ("name", "ann", "body")
    __match_args__ = _fields = ("name", "ann", "body")

    def __init__(self, name: str, ann: Type, body: Term):
        self.name = name
        self.ann = ann
        self.body = body
        self.fv = body.fv
        self.fmv = _without(body.fmv, name)
        self.size = 1 + ann.size + body.size
        self._hash = None
        self._key = None


class Named(Term):
    """The named term ``[a] t`` (the mu-variable applied to a term)."""

    __slots__ = ("name", "body")
    __match_args__ = _fields = ("name", "body")

    def __init__(self, name: str, body: Term):
        self.name = name
        self.body = body
        self.fv = body.fv
        self.fmv = body.fmv | {name} if name not in body.fmv else body.fmv
        self.size = 1 + body.size
        self._hash = None
        self._key = None


class Arg(ETerm):
    __slots__ = ("term",)
    __match_args__ = _fields = ("term",)

    def __init__(self, term: Term):
        self.term = term
        self.fv = term.fv
        self.fmv = term.fmv
        self.size = term.size
        self._hash = None
        self._key = None


class Proj(ETerm):
    __slots__ = ("index",)
    __match_args__ = _fields = ("index",)

    def __init__(self, index: int):
        if index not in (1, 2):
            raise ValueError(f"projection index must be 1 or 2, got {index}")
        self.index = index
        self.fv = EMPTY
        self.fmv = EMPTY
        self.size = 1
        self._hash = None
        self._key = None


class Case(ETerm):
    """The case frame ``case[ann]{x. left | y. right}``."""

    __slots__ = ("ann", "left_var", "left", "right_var", "right")
    __match_args__ = _fields = ("ann", "left_var", "left", "right_var", "right")

    def __init__(self, ann: Type, left_var: str, left: Term, right_var: str, right: Term):
        self.ann = ann
        self.left_var = left_var
        self.left = left
        self.right_var = right_var
        self.right = right
        self.fv = _union(_without(left.fv, left_var), _without(right.fv, right_var))
        self.fmv = _union(left.fmv, right.fmv)
        self.size = 1 + ann.size + left.size + right.size
        self._hash = None
        self._key = None


PROJ1 = Proj(1)
PROJ2 = Proj(2)

Seq = Sequence[ETerm]


# ---------------------------------------------------------------------------
# Names


def fresh(name: str, avoid: Iterable[str]) -> str:
    """A name derived from ``name`` that is not in ``avoid`` and not reserved."""
    avoid = set(avoid)
    avoid.add(name)
    stem = name.rstrip("0123456789") or "v"
    k = 1
    while True:
        cand = f"{stem}{k}"
        if cand not in avoid and cand not in RESERVED:
            return cand
        k += 1


def free_vars(t: Term | ETerm) -> frozenset[str]:
    return t.fv


def free_mu_vars(t: Term | ETerm) -> frozenset[str]:
    return t.fmv


def seq_fv(seq: Seq) -> frozenset[str]:
    out = EMPTY
    for e in seq:
        out = _union(out, e.fv)
    return out


def seq_fmv(seq: Seq) -> frozenset[str]:
    out = EMPTY
    for e in seq:
        out = _union(out, e.fmv)
    return out


# ---------------------------------------------------------------------------
# Ordinary substitution


def _rebind(var: str, body: Term, avoid: frozenset[str]) -> tuple[str, Term]:
    # rename the binder ``var`` of ``body`` away from ``avoid``
    if var not in avoid:
        return var, body
    new = fresh(var, avoid | body.fv)
    return new, subst(body, var, Var(new))


def subst(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``t[x:=v]``."""
    if x not in t.fv:
        return t
    match t:
        case Var():
            return v
        case Lam(y, ann, body):
            y, body = _rebind(y, body, v.fv | {x})
            return Lam(y, ann, subst(body, x, v))
        case App(head, arg):
            return App(subst(head, x, v), subst_e(arg, x, v))
        case Pair(a, b):
            return Pair(subst(a, x, v), subst(b, x, v))
        case Inl(other, body):
            return Inl(other, subst(body, x, v))
        case Inr(other, body):
            return Inr(other, subst(body, x, v))
        case Mu(a, ann, body):
            if a in v.fmv:
                new = fresh(a, v.fmv | body.fmv)
                body = mu_rename(body, a, new)
                a = new
            return Mu(a, ann, subst(body, x, v))
        case Named(a, body):
            return Named(a, subst(body, x, v))
    raise TypeError(f"not a term: {t!r}")


def subst_e(e: ETerm, x: str, v: Term) -> ETerm:
    if x not in e.fv:
        return e
    match e:
        case Arg(t):
            return Arg(subst(t, x, v))
        case Case(ann, y1, u1, y2, u2):
            if x in u1.fv and y1 != x:
                y1, u1 = _rebind(y1, u1, v.fv | {x})
                u1 = subst(u1, x, v)
            if x in u2.fv and y2 != x:
                y2, u2 = _rebind(y2, u2, v.fv | {x})
                u2 = subst(u2, x, v)
            return Case(ann, y1, u1, y2, u2)
    return e


def subst_seq(seq: Seq, x: str, v: Term) -> tuple[ETerm, ...]:
    return tuple(subst_e(e, x, v) for e in seq)


def subst_many(t: Term, mapping: dict[str, Term]) -> Term:
    """Sequential substitution; callers guarantee no mapped value mentions another key."""
    for x, v in mapping.items():
        t = subst(t, x, v)
    return t


# ---------------------------------------------------------------------------
# Structural (mu) substitution


def _mu_map(t: Term, a: str, make: Callable[[Term], Term],
            afv: frozenset[str], afmv: frozenset[str]) -> Term:
    # rewrite every free ``[a] v`` into ``make(v')`` where v' is already rewritten;
    # binders of t are renamed away from afv/afmv, the names ``make`` introduces
    if a not in t.fmv:
        return t

    def go(s: Term) -> Term:
        if a not in s.fmv:
            return s
        match s:
            case Named(b, body):
                body = go(body)
                return make(body) if b == a else Named(b, body)
            case Mu(c, ann, body):
                if c in afmv:
                    new = fresh(c, afmv | body.fmv | {a})
                    body = mu_rename(body, c, new)
                    c = new
                return Mu(c, ann, go(body))
            case Lam(y, ann, body):
                y, body = _rebind(y, body, afv)
                return Lam(y, ann, go(body))
            case App(head, arg):
                return App(go(head), go_e(arg))
            case Pair(u, v):
                return Pair(go(u), go(v))
            case Inl(other, body):
                return Inl(other, go(body))
            case Inr(other, body):
                return Inr(other, go(body))
        raise TypeError(f"not a term: {s!r}")

    def go_e(e: ETerm) -> ETerm:
        if a not in e.fmv:
            return e
        match e:
            case Arg(u):
                return Arg(go(u))
            case Case(ann, y1, u1, y2, u2):
                if a in u1.fmv:
                    y1, u1 = _rebind(y1, u1, afv)
                    u1 = go(u1)
                if a in u2.fmv:
                    y2, u2 = _rebind(y2, u2, afv)
                    u2 = go(u2)
                return Case(ann, y1, u1, y2, u2)
        return e

    return go(t)


def mu_rename(t: Term, a: str, b: str) -> Term:
    """Rename the free mu-name ``a`` to ``b``, avoiding capture by inner binders."""
    return _mu_map(t, a, lambda v: Named(b, v), EMPTY, frozenset((b,)))


def struct_subst(t: Term, a: str, e: ETerm) -> Term:
    """``t[a:=*e]``: each free ``[a] v`` becomes ``[a] (v' e)``; ``e`` is never rewritten."""
    return struct_subst_seq(t, a, (e,))


def struct_subst_seq(t: Term, a: str, seq: Seq) -> Term:
    """``t[a:=*w]``: each free ``[a] v`` becomes ``[a] (v' w1 ... wn)``."""
    if not seq:
        return t
    seq = tuple(seq)
    return _mu_map(t, a, lambda v: Named(a, apply_seq(v, seq)), seq_fv(seq), seq_fmv(seq))


def apply_seq(t: Term, seq: Seq) -> Term:
    for e in seq:
        t = App(t, e)
    return t


def is_nice(seq: Seq) -> bool:
    return not any(isinstance(e, Case) for e in seq[:-1])


def is_good(seq: Seq) -> bool:
    return not any(isinstance(e, Case) for e in seq)


# ---------------------------------------------------------------------------
# Alpha-equivalence


def alpha_key(t: Term | ETerm) -> str:
    """A string that is equal for two terms iff they are alpha-equivalent.

    Bound occurrences print as the distance to their binder, free names as
    themselves. A subterm none of whose free names is bound by the enclosing
    context prints the same wherever it occurs, so its key is cached on it.
    """
    return _key(t, {}, {}, 0)


def _key(s: _Node, lam: dict[str, int], mu: dict[str, int], depth: int) -> str:
    closed = (not lam or s.fv.isdisjoint(lam)) and (not mu or s.fmv.isdisjoint(mu))
    if closed:
        if s._key is not None:
            return s._key
        lam, mu, depth = {}, {}, 0
    match s:
        case Var(x):
            k = f"v#{depth - lam[x]}" if x in lam else "v" + x
        case Lam(x, ann, body):
            k = f"L[{ann.text}]({_key(body, {**lam, x: depth}, mu, depth + 1)})"
        case App(head, arg):
            k = f"@({_key(head, lam, mu, depth)})({_key(arg, lam, mu, depth)})"
        case Pair(u, v):
            k = f"P({_key(u, lam, mu, depth)})({_key(v, lam, mu, depth)})"
        case Inl(other, body):
            k = f"I1[{other.text}]({_key(body, lam, mu, depth)})"
        case Inr(other, body):
            k = f"I2[{other.text}]({_key(body, lam, mu, depth)})"
        case Mu(a, ann, body):
            k = f"M[{ann.text}]({_key(body, lam, {**mu, a: depth}, depth + 1)})"
        case Named(a, body):
            k = (f"N#{depth - mu[a]}" if a in mu else "N" + a) + f"({_key(body, lam, mu, depth)})"
        case Arg(u):
            k = f"A({_key(u, lam, mu, depth)})"
        case Proj(i):
            k = f"pi{i}"
        case Case(ann, y1, u1, y2, u2):
            k = (f"C[{ann.text}]({_key(u1, {**lam, y1: depth}, mu, depth + 1)})"
                 f"({_key(u2, {**lam, y2: depth}, mu, depth + 1)})")
        case _:
            raise TypeError(f"not a term: {s!r}")
    if closed:
        s._key = k
    return k


def alpha_eq(t: Term | ETerm, u: Term | ETerm) -> bool:
    return t is u or alpha_key(t) == alpha_key(u)


def seq_key(seq: Seq) -> str:
    return "&".join(alpha_key(e) for e in seq)
