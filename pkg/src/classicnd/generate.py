"""Typed term generation: exhaustive enumeration and goal-directed sampling."""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .grammar import parse_type
from .syntax import (
    BOT, PROJ1, PROJ2, And, App, Arg, Arrow, Case, ETerm, Inl, Inr, Lam, Mu,
    Named, Or, Pair, PropVar, Term, Type, Var,
)
from .typecheck import Contexts, Judgement, check

P, Q = PropVar("P"), PropVar("Q")

DEFAULT_TYPE_POOL = tuple(parse_type(s) for s in (
    "P", "Q", "bot", "P -> Q", "P /\\ Q", "P \\/ Q", "((P -> bot) -> bot) -> P",
))

MAX_DEPTH = 3


@dataclass(frozen=True)
class GenConfig:
    max_size: int = 8
    seed: int = 42
    sample_count: int = 10_000
    type_pool: tuple[Type, ...] = DEFAULT_TYPE_POOL
    depth: int = 2
    fuel: int = 10**6
    sample_max_size: int = 20
    lemma_instances: int = 2000

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be between 0 and {MAX_DEPTH}")
        if self.sample_count < 0 or self.lemma_instances < 0:
            raise ValueError("counts must be non-negative")
        if self.sample_max_size < 1:
            raise ValueError("sample_max_size must be at least 1")


def enumeration_contexts(pool: tuple[Type, ...]) -> list[Contexts]:
    """The fixed context scheme ``{x1:T1, x2:T2 ; a1:S}`` used by ``enumerate_typed``.

    Contexts: the empty one, ``x1:T`` for every pool type, and for the
    i-th pool type ``x1:T_i, x2:T_(i+1) ; a1:T_(i+2)`` (indices modulo the
    pool size).
    """
    k = len(pool)
    out = [Contexts({}, {})]
    out.extend(Contexts({"x1": t}, {}) for t in pool)
    out.extend(Contexts({"x1": pool[i], "x2": pool[(i + 1) % k]}, {"a1": pool[(i + 2) % k]})
               for i in range(k))
    return out


# ---------------------------------------------------------------------------
# Exhaustive enumeration

Ctx = tuple[tuple[str, Type], ...]


class Enumerator:
    """All typed terms of a given size, grouped by type.

    Bound names are fixed by binding depth (``v<k>`` for lambda, ``b<k>``
    for mu), so each alpha-class is produced exactly once.
    """

    def __init__(self, annotations: tuple[Type, ...]):
        self.ann = tuple(annotations)
        self.gen = lru_cache(maxsize=None)(self._gen)

    def _gen(self, g: Ctx, d: Ctx, n: int) -> dict[Type, list[Term]]:
        res: dict[Type, list[Term]] = defaultdict(list)
        if n == 1:
            for x, t in g:
                res[t].append(Var(x))
            return dict(res)
        gen = self.gen
        v = f"v{len(g)}"
        for a in self.ann:
            if a.size + 2 > n:
                continue
            for b, ts in gen(g + ((v, a),), d, n - 1 - a.size).items():
                res[Arrow(a, b)].extend(Lam(v, a, t) for t in ts)
        for b in self.ann:
            if b.size + 2 > n:
                continue
            for a, ts in gen(g, d, n - 1 - b.size).items():
                res[Or(a, b)].extend(Inl(b, t) for t in ts)
                res[Or(b, a)].extend(Inr(b, t) for t in ts)
        mu = f"b{len(d)}"
        for a in self.ann:
            if a.size + 2 > n:
                continue
            for t in gen(g, d + ((mu, a),), n - 1 - a.size).get(BOT, ()):
                res[a].append(Mu(mu, a, t))
        for name, a in d:
            for t in gen(g, d, n - 1).get(a, ()):
                res[BOT].append(Named(name, t))
        for s1 in range(1, n - 1):
            s2 = n - 1 - s1
            left, right = gen(g, d, s1), gen(g, d, s2)
            for a, us in left.items():
                for b, ws in right.items():
                    res[And(a, b)].extend(Pair(u, w) for u in us for w in ws)
                if isinstance(a, Arrow) and a.dom in right:
                    res[a.cod].extend(App(u, Arg(w)) for u in us for w in right[a.dom])
        if n >= 3:
            for a, us in gen(g, d, n - 2).items():
                if isinstance(a, And):
                    res[a.left].extend(App(u, PROJ1) for u in us)
                    res[a.right].extend(App(u, PROJ2) for u in us)
        # application node + head + case node + annotation + two branches
        for s1 in range(1, n - 4):
            heads = [(a, us) for a, us in gen(g, d, s1).items() if isinstance(a, Or)]
            if not heads:
                continue
            for s2 in range(1, n - 3 - s1):
                for s3 in range(1, n - 2 - s1 - s2):
                    ann_size = n - 2 - s1 - s2 - s3
                    for a, us in heads:
                        ls = gen(g + ((v, a.left),), d, s2)
                        rs = gen(g + ((v, a.right),), d, s3)
                        for c, lts in ls.items():
                            if c.size != ann_size or c not in rs:
                                continue
                            res[c].extend(App(u, Case(c, v, lt, v, r))
                                          for u in us for lt in lts for r in rs[c])
        return dict(res)

    def terms(self, ctx: Contexts, n: int) -> dict[Type, list[Term]]:
        return self.gen(tuple(ctx.gamma.items()), tuple(ctx.delta.items()), n)


def enumerate_typed(cfg: GenConfig) -> Iterator[Judgement]:
    """Every typed term of size <= ``cfg.max_size`` over the context scheme.

    Order: context, then size, then type text, then generation order. Each
    judgement is re-validated by ``check``.
    """
    enum = Enumerator(cfg.type_pool)
    for ctx in enumeration_contexts(cfg.type_pool):
        for n in range(1, cfg.max_size + 1):
            by_type = enum.terms(ctx, n)
            for ty in sorted(by_type, key=lambda t: t.text):
                for t in by_type[ty]:
                    yield check(ctx, t, ty)


# ---------------------------------------------------------------------------
# Random goal-directed sampling


class GenerationStuck(RuntimeError):
    pass


class Sampler:
    """Grows a derivation top-down from a goal type, favouring cuts.

    Every constructor choice is a typing rule read upwards; the "cut"
    choices build an introduction (or a mu, or a case) immediately consumed
    by an elimination so that every redex kind shows up in the output.
    """

    WORK_CAP = 4000

    def __init__(self, pool: tuple[Type, ...], rng: random.Random):
        self.pool = tuple(pool)
        # types invented inside cuts; large ones rarely fit the budget
        self.aux = tuple(t for t in pool if t.size <= 3) or self.pool
        self.rng = rng
        self.work = 0
        self.small = Enumerator(self.aux)

    SMALL = 4

    def _small_terms(self, g, d, goal, budget) -> list[Term]:
        out = []
        for n in range(1, min(budget, self.SMALL) + 1):
            out.extend(self.small.gen(g, d, n).get(goal, ()))
        return out

    # entry points

    def term(self, ctx: Contexts, goal: Type, budget: int) -> Term:
        self.work = 0
        return self.gen(tuple(ctx.gamma.items()), tuple(ctx.delta.items()), goal, budget)

    def seq(self, ctx: Contexts, ty: Type, budget: int, max_len: int = 3,
            allow_case: bool = True) -> tuple[list[ETerm], Type]:
        """A random well-typed nice elimination sequence for a term of type ``ty``."""
        g, d = tuple(ctx.gamma.items()), tuple(ctx.delta.items())
        out: list[ETerm] = []
        for _ in range(self.rng.randint(0, max_len)):
            self.work = 0
            try:
                match ty:
                    case Arrow(a, b):
                        out.append(Arg(self.gen(g, d, a, max(1, budget // 2))))
                        ty = b
                    case And(a, b):
                        i = self.rng.randint(1, 2)
                        out.append(PROJ1 if i == 1 else PROJ2)
                        ty = a if i == 1 else b
                    case Or(a, b) if allow_case:
                        c = self.rng.choice(self.pool)
                        v = f"v{len(g)}"
                        left = self.gen(g + ((v, a),), d, c, max(1, budget // 3))
                        right = self.gen(g + ((v, b),), d, c, max(1, budget // 3))
                        out.append(Case(c, v, left, v, right))
                        return out, c
                    case _:
                        return out, ty
            except GenerationStuck:
                break
        return out, ty

    # the generator proper

    def gen(self, g: Ctx, d: Ctx, goal: Type, budget: int) -> Term:
        self.work += 1
        if budget < 1 or self.work > self.WORK_CAP:
            raise GenerationStuck(goal)
        rng = self.rng
        options: list[tuple[float, object]] = []
        matching = [x for x, t in g if t == goal]
        if matching:
            options.append((4.0 if budget < 4 else 0.4, lambda: Var(rng.choice(matching))))
        small = self._small_terms(g, d, goal, budget)
        if small:
            options.append((3.0 if budget <= self.SMALL else 0.3, lambda: rng.choice(small)))
        if budget >= 2:
            options.append((2.0, lambda: self._intro(g, d, goal, budget)))
        if budget >= 3 + goal.size:
            options.append((0.8, lambda: self._mu(g, d, goal, budget)))
        if budget >= 5:
            options.append((1.0, lambda: self._elim(g, d, goal, budget)))
            options.append((1.0, lambda: self._beta(g, d, goal, budget)))
            options.append((0.6, lambda: self._proj(g, d, goal, budget)))
        if budget >= 8:
            options.append((0.6, lambda: self._case_inj(g, d, goal, budget)))
            options.append((0.8, lambda: self._classical(g, d, goal, budget)))
        if budget >= 11:
            options.append((2.0, lambda: self._permutative(g, d, goal, budget)))
        for _ in range(4):
            if not options:
                break
            total = sum(w for w, _ in options)
            pick = rng.uniform(0, total)
            for i, (w, fn) in enumerate(options):
                pick -= w
                if pick <= 0:
                    break
            _, fn = options.pop(i)
            try:
                t = fn()
            except GenerationStuck:
                continue
            if t.size <= budget:
                return t
        raise GenerationStuck(goal)

    def _two(self, g, d, ta, ga, tb, gb, budget, da=None, db=None):
        # two subterms sharing ``budget``
        b1 = self.rng.randint(1, max(1, budget - 1))
        u = self.gen(ga, da if da is not None else d, ta, b1)
        w = self.gen(gb, db if db is not None else d, tb, budget - u.size)
        return u, w

    def _intro(self, g, d, goal, budget):
        match goal:
            case Arrow(a, b):
                v = f"v{len(g)}"
                return Lam(v, a, self.gen(g + ((v, a),), d, b, budget - 1 - a.size))
            case And(a, b):
                u, w = self._two(g, d, a, g, b, g, budget - 1)
                return Pair(u, w)
            case Or(a, b):
                if self.rng.random() < 0.5:
                    return Inl(b, self.gen(g, d, a, budget - 1 - b.size))
                return Inr(a, self.gen(g, d, b, budget - 1 - a.size))
        if goal == BOT and d:
            name, a = self.rng.choice(d)
            return Named(name, self.gen(g, d, a, budget - 1))
        raise GenerationStuck(goal)

    def _mu(self, g, d, goal, budget):
        b = f"b{len(d)}"
        return Mu(b, goal, self.gen(g, d + ((b, goal),), BOT, budget - 1 - goal.size))

    def _elim(self, g, d, goal, budget):
        # an elimination whose head is generated at a larger type
        kind = self.rng.randrange(3)
        other = self.rng.choice(self.aux)
        if kind == 0:
            h, v = self._two(g, d, Arrow(other, goal), g, other, g, budget - 1)
            return App(h, Arg(v))
        if kind == 1:
            i = self.rng.randint(1, 2)
            ty = And(goal, other) if i == 1 else And(other, goal)
            return App(self.gen(g, d, ty, budget - 2), PROJ1 if i == 1 else PROJ2)
        return self._case_on(g, d, self.gen(g, d, Or(other, self.rng.choice(self.aux)), budget // 3),
                             goal, budget)

    def _case_on(self, g, d, head: Term, goal, budget):
        a, b = self._head_type(g, d, head)
        v = f"v{len(g)}"
        rest = budget - 2 - head.size - goal.size
        left, right = self._two(g, d, goal, g + ((v, a),), goal, g + ((v, b),), rest)
        return App(head, Case(goal, v, left, v, right))

    def _head_type(self, g, d, head):
        from .typecheck import infer
        ty = infer(Contexts(dict(g), dict(d)), head)
        return ty.left, ty.right

    def _beta(self, g, d, goal, budget):
        a = self.rng.choice(self.aux)
        v = f"v{len(g)}"
        rest = budget - 2 - a.size
        body, arg = self._two(g, d, goal, g + ((v, a),), a, g, rest)
        return App(Lam(v, a, body), Arg(arg))

    def _proj(self, g, d, goal, budget):
        other = self.rng.choice(self.aux)
        i = self.rng.randint(1, 2)
        if i == 1:
            u, w = self._two(g, d, goal, g, other, g, budget - 3)
            return App(Pair(u, w), PROJ1)
        u, w = self._two(g, d, other, g, goal, g, budget - 3)
        return App(Pair(u, w), PROJ2)

    def _case_inj(self, g, d, goal, budget):
        a, b = self.rng.choice(self.aux), self.rng.choice(self.aux)
        if self.rng.random() < 0.5:
            inj = Inl(b, self.gen(g, d, a, budget // 3))
        else:
            inj = Inr(a, self.gen(g, d, b, budget // 3))
        return self._case_on(g, d, inj, goal, budget)

    def _eliminator(self, g, d, goal, budget) -> tuple[Type, ETerm]:
        # a type C and an E-term e with elim_type(C, e) == goal
        kind = self.rng.choices((0, 1, 2), weights=(0.35, 0.45, 0.2))[0]
        other = self.rng.choice(self.aux)
        if kind == 0:
            return Arrow(other, goal), Arg(self.gen(g, d, other, budget))
        if kind == 1:
            return And(goal, other), PROJ1
        c = Or(other, self.rng.choice(self.aux))
        v = f"v{len(g)}"
        left, right = self._two(g, d, goal, g + ((v, c.left),), goal, g + ((v, c.right),), budget)
        return c, Case(goal, v, left, v, right)

    def _classical(self, g, d, goal, budget):
        c, e = self._eliminator(g, d, goal, budget // 3)
        b = f"b{len(d)}"
        body = self.gen(g, d + ((b, c),), BOT, budget - 2 - c.size - e.size)
        return App(Mu(b, c, body), e)

    def _permutative(self, g, d, goal, budget):
        # the shape is tight under the size budget, so try a few times
        for _ in range(self.PERMUTATIVE_TRIES):
            try:
                return self._permutative_once(g, d, goal, budget)
            except GenerationStuck:
                continue
        raise GenerationStuck(goal)

    PERMUTATIVE_TRIES = 6

    def _permutative_once(self, g, d, goal, budget):
        c, e = self._eliminator(g, d, goal, max(1, budget // 5))
        # left for the head and both branches once the two applications,
        # the case node and its annotation are paid for
        rest = budget - 3 - e.size - c.size
        if rest < 3:
            raise GenerationStuck(goal)
        ors = [x for x, t in g if isinstance(t, Or)]
        if ors and self.rng.random() < 0.5:
            head = Var(self.rng.choice(ors))
        else:
            # with c as a disjunct a branch can be just the bound variable
            side = self.rng.choice(self.aux)
            ty = Or(c, side) if self.rng.random() < 0.5 else Or(side, c)
            head = self.gen(g, d, ty, rest - 2)
        inner = self._case_on(g, d, head, c, budget - 1 - e.size)
        return App(inner, e)


def sample_typed(cfg: GenConfig) -> Iterator[Judgement]:
    """``cfg.sample_count`` random judgements of size <= ``cfg.sample_max_size``.

    Reproducible from ``cfg.seed``; every judgement is re-validated by ``check``.
    """
    rng = random.Random(cfg.seed)
    sampler = Sampler(cfg.type_pool, rng)
    contexts = enumeration_contexts(cfg.type_pool)
    emitted = 0
    failures = 0
    while emitted < cfg.sample_count:
        ctx = rng.choice(contexts)
        goal = rng.choice(cfg.type_pool)
        budget = rng.randint(1, cfg.sample_max_size)
        try:
            t = sampler.term(ctx, goal, budget)
            if t.size < budget // 2:
                raise GenerationStuck(goal)
        except GenerationStuck:
            failures += 1
            if failures > 1000 * (cfg.sample_count + 1):
                raise
            continue
        yield check(ctx, t, goal)
        emitted += 1
