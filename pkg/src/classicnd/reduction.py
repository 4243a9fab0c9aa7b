"""Cut elimination: redexes, one-step reduction, reduction graphs, eta, SN.

Positions are tuples of child indices. Children of a node, in order:
``Lam``/``Inl``/``Inr``/``Mu``/``Named`` have their body at 0; ``Pair`` has
0 and 1; ``App`` has its head at 0 and then the E-term's terms: the argument
of ``Arg`` at 1, or the two branches of ``Case`` at 1 and 2.

Reduction graphs are keyed by ``alpha_key`` so alpha-variants collapse into
one node.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .syntax import (
    App, Arg, Case, ETerm, Inl, Inr, Lam, Mu, Named, Pair, Proj, Seq, Term,
    _rebind, alpha_key, fresh, mu_rename, struct_subst, subst,
)
from .typecheck import ElimMismatch, elim_type

DEFAULT_FUEL = 10**6


class RedexKind(enum.Enum):
    BETA = "beta"
    PROJ1 = "proj1"
    PROJ2 = "proj2"
    CASE1 = "case1"
    CASE2 = "case2"
    PERMUTATIVE = "permutative"
    CLASSICAL = "classical"

    @property
    def family(self) -> str:
        """One of the five rule schemata: beta, proj, case, permutative, classical."""
        return self.value.rstrip("12")


FAMILIES = ("beta", "proj", "case", "permutative", "classical")


class ReductionStep(NamedTuple):
    path: tuple[int, ...]
    kind: RedexKind

    def __str__(self):
        return f"{'.'.join(map(str, self.path)) or 'root'} {self.kind.value}"


class InvalidStep(ValueError):
    pass


class FuelExhausted(RuntimeError):
    def __init__(self, fuel: int):
        super().__init__(f"reduction graph exceeded {fuel} node expansions")
        self.fuel = fuel


class NotStronglyNormalizing(RuntimeError):
    pass


class ConfluenceError(AssertionError):
    pass


# ---------------------------------------------------------------------------
# Single steps


def root_kind(t: Term) -> RedexKind | None:
    if not isinstance(t, App):
        return None
    head, arg = t.head, t.arg
    if isinstance(head, Lam):
        return RedexKind.BETA if isinstance(arg, Arg) else None
    if isinstance(head, Pair):
        if isinstance(arg, Proj):
            return RedexKind.PROJ1 if arg.index == 1 else RedexKind.PROJ2
        return None
    if isinstance(head, (Inl, Inr)):
        if isinstance(arg, Case):
            return RedexKind.CASE1 if isinstance(head, Inl) else RedexKind.CASE2
        return None
    if isinstance(head, App) and isinstance(head.arg, Case):
        return RedexKind.PERMUTATIVE
    if isinstance(head, Mu):
        return RedexKind.CLASSICAL
    return None


def _reannotate(ann, e: ETerm):
    # untyped terms keep their old annotation; they fail typing anyway
    try:
        return elim_type(ann, e)
    except ElimMismatch:
        return ann


def contract(t: Term, kind: RedexKind) -> Term:
    """Contract the redex at the root of ``t``."""
    head, e = t.head, t.arg
    if kind is RedexKind.BETA:
        return subst(head.body, head.var, e.term)
    if kind is RedexKind.PROJ1:
        return head.fst
    if kind is RedexKind.PROJ2:
        return head.snd
    if kind is RedexKind.CASE1:
        return subst(e.left, e.left_var, head.body)
    if kind is RedexKind.CASE2:
        return subst(e.right, e.right_var, head.body)
    if kind is RedexKind.PERMUTATIVE:
        c = head.arg
        x1, u1 = _rebind(c.left_var, c.left, e.fv)
        x2, u2 = _rebind(c.right_var, c.right, e.fv)
        return App(head.head, Case(_reannotate(c.ann, e), x1, App(u1, e), x2, App(u2, e)))
    if kind is RedexKind.CLASSICAL:
        a, body = head.name, head.body
        if a in e.fmv:
            new = fresh(a, e.fmv | body.fmv)
            body = mu_rename(body, a, new)
            a = new
        return Mu(a, _reannotate(head.ann, e), struct_subst(body, a, e))
    raise InvalidStep(f"unknown redex kind {kind}")


def one_steps(t: Term) -> list[tuple[tuple[int, ...], RedexKind, Term]]:
    """Every one-step reduct of ``t`` with its position, in leftmost-outermost order."""
    out = []
    kind = root_kind(t)
    if kind is not None:
        out.append(((), kind, contract(t, kind)))
    match t:
        case Lam(x, ann, body):
            for p, k, r in one_steps(body):
                out.append(((0,) + p, k, Lam(x, ann, r)))
        case App(head, arg):
            for p, k, r in one_steps(head):
                out.append(((0,) + p, k, App(r, arg)))
            match arg:
                case Arg(v):
                    for p, k, r in one_steps(v):
                        out.append(((1,) + p, k, App(head, Arg(r))))
                case Case(ann, x, left, y, right):
                    for p, k, r in one_steps(left):
                        out.append(((1,) + p, k, App(head, Case(ann, x, r, y, right))))
                    for p, k, r in one_steps(right):
                        out.append(((2,) + p, k, App(head, Case(ann, x, left, y, r))))
        case Pair(a, b):
            for p, k, r in one_steps(a):
                out.append(((0,) + p, k, Pair(r, b)))
            for p, k, r in one_steps(b):
                out.append(((1,) + p, k, Pair(a, r)))
        case Inl(other, body):
            for p, k, r in one_steps(body):
                out.append(((0,) + p, k, Inl(other, r)))
        case Inr(other, body):
            for p, k, r in one_steps(body):
                out.append(((0,) + p, k, Inr(other, r)))
        case Mu(a, ann, body):
            for p, k, r in one_steps(body):
                out.append(((0,) + p, k, Mu(a, ann, r)))
        case Named(a, body):
            for p, k, r in one_steps(body):
                out.append(((0,) + p, k, Named(a, r)))
    return out


def children(t: Term) -> list[Term]:
    match t:
        case Lam(_, _, body) | Inl(_, body) | Inr(_, body) | Mu(_, _, body) | Named(_, body):
            return [body]
        case Pair(a, b):
            return [a, b]
        case App(head, Arg(v)):
            return [head, v]
        case App(head, Case(_, _, left, _, right)):
            return [head, left, right]
        case App(head, _):
            return [head]
    return []


def replace_child(t: Term, i: int, new: Term) -> Term:
    match t:
        case Lam(x, ann, _):
            return Lam(x, ann, new)
        case Inl(other, _):
            return Inl(other, new)
        case Inr(other, _):
            return Inr(other, new)
        case Mu(a, ann, _):
            return Mu(a, ann, new)
        case Named(a, _):
            return Named(a, new)
        case Pair(a, b):
            return Pair(new, b) if i == 0 else Pair(a, new)
        case App(head, arg):
            if i == 0:
                return App(new, arg)
            if isinstance(arg, Arg):
                return App(head, Arg(new))
            if isinstance(arg, Case):
                if i == 1:
                    return App(head, Case(arg.ann, arg.left_var, new, arg.right_var, arg.right))
                return App(head, Case(arg.ann, arg.left_var, arg.left, arg.right_var, new))
    raise InvalidStep(f"no child {i} in {type(t).__name__}")


def subterm_at(t: Term, path: Iterable[int]) -> Term:
    for i in path:
        kids = children(t)
        if i >= len(kids):
            raise InvalidStep(f"path leaves the term at index {i}")
        t = kids[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    """Plain (capturing) replacement of the subterm at ``path``."""
    if not path:
        return new
    kids = children(t)
    if path[0] >= len(kids):
        raise InvalidStep(f"path leaves the term at index {path[0]}")
    return replace_child(t, path[0], replace_at(kids[path[0]], path[1:], new))


def redexes(t: Term) -> list[ReductionStep]:
    out = []

    def go(s: Term, path: tuple[int, ...]):
        kind = root_kind(s)
        if kind is not None:
            out.append(ReductionStep(path, kind))
        for i, c in enumerate(children(s)):
            go(c, path + (i,))

    go(t, ())
    return out


def step(t: Term, s: ReductionStep) -> Term:
    sub = subterm_at(t, s.path)
    if root_kind(sub) is not s.kind:
        raise InvalidStep(f"no {s.kind.value} redex at {s}")
    return replace_at(t, s.path, contract(sub, s.kind))


def reducts(t: Term) -> list[Term]:
    """One-step reducts, one per alpha-class, in leftmost-outermost order."""
    seen = {}
    for _, _, r in one_steps(t):
        seen.setdefault(alpha_key(r), r)
    return list(seen.values())


def eterm_reducts(e: ETerm) -> list[ETerm]:
    match e:
        case Arg(t):
            return [Arg(r) for r in reducts(t)]
        case Case(ann, x, left, y, right):
            return ([Case(ann, x, r, y, right) for r in reducts(left)]
                    + [Case(ann, x, left, y, r) for r in reducts(right)])
    return []


# ---------------------------------------------------------------------------
# Reduction graphs


@dataclass(frozen=True)
class SN:
    graph_size: int
    eta: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unknown:
    reason: str = "fuel"

    def __bool__(self):
        return False


@dataclass
class ReductionGraph:
    root: Term
    nodes: dict[str, Term]
    edges: list[tuple[str, ReductionStep, str]]

    @property
    def root_key(self) -> str:
        return alpha_key(self.root)

    def normal_forms(self) -> list[Term]:
        sources = {src for src, _, _ in self.edges}
        return [t for k, t in self.nodes.items() if k not in sources]


def reduction_graph(t: Term, fuel: int = DEFAULT_FUEL) -> ReductionGraph:
    """The full reduction graph of ``t`` with every node's term kept."""
    root = alpha_key(t)
    nodes = {root: t}
    edges = []
    todo = [root]
    expansions = 0
    while todo:
        k = todo.pop()
        expansions += 1
        if expansions > fuel:
            raise FuelExhausted(fuel)
        for path, kind, r in one_steps(nodes[k]):
            rk = alpha_key(r)
            edges.append((k, ReductionStep(path, kind), rk))
            if rk not in nodes:
                nodes[rk] = r
                todo.append(rk)
    return ReductionGraph(t, nodes, edges)


@dataclass
class _Summary:
    eta: int
    normal_forms: frozenset[str]
    kinds: frozenset[RedexKind]


@dataclass
class Engine:
    """Memoized reduction-graph explorer shared across many queries.

    ``succ`` only ever holds nodes whose whole reachable graph is present:
    an exploration that runs out of fuel is rolled back.
    """

    max_entries: int = 2_000_000
    succ: dict[str, tuple[tuple[RedexKind, str], ...]] = field(default_factory=dict)
    nf_terms: dict[str, Term] = field(default_factory=dict)
    summary: dict[str, _Summary] = field(default_factory=dict)

    def clear(self):
        self.succ.clear()
        self.nf_terms.clear()
        self.summary.clear()

    def explore(self, t: Term, fuel: int = DEFAULT_FUEL) -> str:
        if len(self.succ) > self.max_entries:
            self.clear()
        root = alpha_key(t)
        if root in self.succ:
            return root
        pending = {root: t}
        todo = [root]
        added = []
        while todo:
            k = todo.pop()
            if k in self.succ:
                continue
            if len(added) >= fuel:
                for a in added:
                    del self.succ[a]
                    self.nf_terms.pop(a, None)
                raise FuelExhausted(fuel)
            term = pending.pop(k)
            edges = []
            for _, kind, r in one_steps(term):
                rk = alpha_key(r)
                edges.append((kind, rk))
                if rk not in self.succ and rk not in pending:
                    pending[rk] = r
                    todo.append(rk)
            self.succ[k] = tuple(edges)
            if not edges:
                self.nf_terms[k] = term
            added.append(k)
        return root

    def summarize(self, root: str) -> _Summary:
        """Longest path, reachable normal forms and redex kinds below ``root``."""
        if root in self.summary:
            return self.summary[root]
        on_path = set()
        stack = [(root, False)]
        while stack:
            k, finished = stack.pop()
            if k in self.summary:
                continue
            edges = self.succ[k]
            if finished:
                on_path.discard(k)
                if not edges:
                    self.summary[k] = _Summary(0, frozenset((k,)), frozenset())
                    continue
                subs = [self.summary[c] for _, c in edges]
                nfs = subs[0].normal_forms
                kinds = {kind for kind, _ in edges}
                for s in subs:
                    if s.normal_forms is not nfs:
                        nfs = nfs | s.normal_forms
                    kinds |= s.kinds
                self.summary[k] = _Summary(1 + max(s.eta for s in subs), nfs, frozenset(kinds))
                continue
            if k in on_path:
                raise NotStronglyNormalizing(f"reduction cycle through {k}")
            on_path.add(k)
            stack.append((k, True))
            for _, c in edges:
                if c in on_path:
                    raise NotStronglyNormalizing(f"reduction cycle through {c}")
                if c not in self.summary:
                    stack.append((c, False))
        return self.summary[root]

    def reachable(self, root: str) -> set[str]:
        seen = {root}
        todo = [root]
        while todo:
            for _, c in self.succ[todo.pop()]:
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return seen

    # convenience queries

    def is_sn(self, t: Term | ETerm, fuel: int = DEFAULT_FUEL, with_size: bool = True) -> SN | Unknown:
        match t:
            case Arg(u):
                return self.is_sn(u, fuel, with_size)
            case Proj():
                return SN(1, 0)
            case Case(_, _, left, _, right):
                a = self.is_sn(left, fuel, with_size)
                b = self.is_sn(right, fuel, with_size)
                if not (a and b):
                    return Unknown(a.reason if not a else b.reason)
                return SN(a.graph_size * b.graph_size, a.eta + b.eta)
        try:
            root = self.explore(t, fuel)
            eta = self.summarize(root).eta
        except FuelExhausted:
            return Unknown("fuel")
        except NotStronglyNormalizing:
            return Unknown("cycle")
        return SN(len(self.reachable(root)) if with_size else -1, eta)

    def eta(self, t: Term | ETerm, fuel: int = DEFAULT_FUEL) -> int:
        match t:
            case Arg(u):
                return self.eta(u, fuel)
            case Proj():
                return 0
            case Case(_, _, left, _, right):
                return self.eta(left, fuel) + self.eta(right, fuel)
        return self.summarize(self.explore(t, fuel)).eta

    def normal_forms(self, t: Term, fuel: int = DEFAULT_FUEL) -> list[Term]:
        nfs = self.summarize(self.explore(t, fuel)).normal_forms
        return [self.nf_terms[k] for k in sorted(nfs)]

    def reaches(self, t: Term, target: Term, fuel: int = DEFAULT_FUEL) -> bool:
        """``t`` reduces to ``target`` in zero or more steps (up to alpha)."""
        return alpha_key(target) in self.reachable(self.explore(t, fuel))


ENGINE = Engine()


def is_sn(t: Term | ETerm, fuel: int = DEFAULT_FUEL) -> SN | Unknown:
    return ENGINE.is_sn(t, fuel)


def eta(t: Term | ETerm, fuel: int = DEFAULT_FUEL) -> int:
    """Length of the longest reduction sequence from ``t``."""
    return ENGINE.eta(t, fuel)


def eta_seq(seq: Seq, fuel: int = DEFAULT_FUEL) -> int:
    return sum(ENGINE.eta(e, fuel) for e in seq)


def normal_forms(t: Term, fuel: int = DEFAULT_FUEL) -> list[Term]:
    return ENGINE.normal_forms(t, fuel)


STRATEGIES = ("leftmost-outermost", "random", "exhaustive")


def normalize(t: Term, strategy: str = "leftmost-outermost", seed: int = 0,
              fuel: int = DEFAULT_FUEL) -> tuple[Term, list[ReductionStep]]:
    """Reduce ``t`` to normal form, returning it with the steps taken.

    ``exhaustive`` additionally builds the whole reduction graph and raises
    ``ConfluenceError`` unless every maximal path ends in one alpha-class;
    its trace is the leftmost-outermost one.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "exhaustive":
        nfs = ENGINE.normal_forms(t, fuel)
        if len(nfs) != 1:
            raise ConfluenceError(f"{len(nfs)} distinct normal forms")
    rng = random.Random(seed)
    trace = []
    while True:
        steps = redexes(t)
        if not steps:
            return t, trace
        if len(trace) >= fuel:
            raise FuelExhausted(fuel)
        s = rng.choice(steps) if strategy == "random" else steps[0]
        t = step(t, s)
        trace.append(s)
