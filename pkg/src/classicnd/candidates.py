"""Finite, depth-bounded face of the reducibility candidates.

A candidate R is of the form ``X -> N``: the terms t with ``(t w)`` strongly
normalizing for every sequence w of a nice set X. Here only the interpretation
sending every propositional variable to N is represented, and X is replaced
by a finite *battery* of nice sequences built by unfolding the ->, /\\ and \\/
constructions to a fixed depth. A battery only ever contains sequences that
belong to the true orthogonal, so ``member_test`` is a necessary condition
for membership, never a sufficient one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .generate import Enumerator
from .reduction import DEFAULT_FUEL, ENGINE, Engine
from .syntax import (
    BOT, PROJ1, PROJ2, And, App, Arg, Arrow, Case, ETerm, Lam, Mu, Or, Term, Type,
    Var, alpha_key, apply_seq, fresh, is_nice, seq_key, struct_subst_seq, subformulas, subst,
)
from .typecheck import ElimMismatch, Judgement, seq_type

# every variable belongs to every candidate; distinct variables are never needed
CANDIDATE_VAR = "r"
BOT_VAR = "z"
MU_NAME = "a"
CASE_VAR = "c"

# strongly normalizing terms of type bot without free mu-names
BOT_POOL: tuple[Term, ...] = (
    Var(BOT_VAR),
    App(Lam("q", BOT, Var("q")), Arg(Var(BOT_VAR))),
)

INHABITANT_CAP = 8
COMBINATION_CAP = 64


@dataclass(frozen=True)
class Battery:
    type: Type
    depth: int
    seqs: tuple[tuple[ETerm, ...], ...]

    def keys(self) -> set[str]:
        return {seq_key(s) for s in self.seqs}


@dataclass(frozen=True)
class Interpretation:
    """Sends every propositional variable to the set of SN terms."""

    name: str = "I_N"

    def inhabitants(self, t: Type, depth: int) -> tuple[Term, ...]:
        return inhabitants(t, depth)

    def orthogonal(self, t: Type, depth: int) -> Battery:
        return battery(t, depth)


I_N = Interpretation()


@lru_cache(maxsize=None)
def _closed_enumerator(t: Type) -> Enumerator:
    anns = tuple(subformulas(t))
    return Enumerator(anns if BOT in anns else anns + (BOT,))


@lru_cache(maxsize=None)
def inhabitants(t: Type, depth: int) -> tuple[Term, ...]:
    """Finitely many members of I_N(t), a prefix of ``inhabitants(t, depth + 1)``.

    A free variable, then ``mu a.u`` for u in ``BOT_POOL`` (depth >= 1), then
    closed terms of type t up to size ``3 * depth`` in enumeration order.
    """
    out: list[Term] = [Var(CANDIDATE_VAR)]
    if depth >= 1:
        out.extend(Mu(MU_NAME, t, u) for u in BOT_POOL)
        enum = _closed_enumerator(t)
        for n in range(1, 3 * depth + 1):
            out.extend(enum.gen((), (), n).get(t, ()))
            if len(out) >= INHABITANT_CAP:
                break
    return tuple(out[:INHABITANT_CAP])


@lru_cache(maxsize=None)
def battery(t: Type, depth: int) -> Battery:
    """A finite nice set of sequences inside I_N(t)-orthogonal, containing the empty one."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    seqs: list[tuple[ETerm, ...]] = [()]
    if depth > 0:
        match t:
            case Arrow(a, b):
                for u in inhabitants(a, depth - 1):
                    for vs in battery(b, depth - 1).seqs:
                        seqs.append((Arg(u),) + vs)
            case And(a, b):
                seqs.extend((PROJ1,) + vs for vs in battery(a, depth - 1).seqs)
                seqs.extend((PROJ2,) + vs for vs in battery(b, depth - 1).seqs)
            case Or(a, b):
                for us in battery(a, depth - 1).seqs:
                    for vs in battery(b, depth - 1).seqs:
                        try:
                            ann = seq_type(a, us)
                        except ElimMismatch:
                            ann = BOT
                        left = apply_seq(Var(CASE_VAR), us)
                        right = apply_seq(Var(CASE_VAR), vs)
                        seqs.append((Case(ann, CASE_VAR, left, CASE_VAR, right),))
                seqs.append((Case(BOT, CASE_VAR, Var(BOT_VAR), CASE_VAR, Var(BOT_VAR)),))
    seen: dict[str, tuple[ETerm, ...]] = {}
    for s in seqs:
        seen.setdefault(seq_key(s), s)
    out = tuple(seen.values())
    assert all(is_nice(s) for s in out)
    return Battery(t, depth, out)


_MEMBER_MEMO: dict[tuple[str, Type, int, int], bool] = {}
_MEMO_LIMIT = 1_000_000


def member_test(t: Term, ty: Type, depth: int, fuel: int = DEFAULT_FUEL,
                engine: Engine = ENGINE) -> bool:
    """Every battery sequence for ``ty`` applied to ``t`` is SN (a necessary condition)."""
    key = (alpha_key(t), ty, depth, fuel)
    hit = _MEMBER_MEMO.get(key)
    if hit is None:
        hit = all(engine.is_sn(apply_seq(t, seq), fuel, with_size=False)
                  for seq in battery(ty, depth).seqs)
        if engine is ENGINE:
            if len(_MEMBER_MEMO) > _MEMO_LIMIT:
                _MEMBER_MEMO.clear()
            _MEMBER_MEMO[key] = hit
    return hit


def bounded_product(sizes: list[int], cap: int = COMBINATION_CAP) -> list[tuple[int, ...]]:
    """Index tuples of the cartesian product, ordered so early ones touch every index.

    Sorted by largest index used, then lexicographically, then truncated to ``cap``.
    """
    combos = list(itertools.product(*(range(n) for n in sizes)))
    combos.sort(key=lambda c: (max(c, default=0), c))
    return combos[:cap]


def adequation_instances(j: Judgement, depth: int) -> list[Term]:
    """``j.term`` with candidate members for its lambda-variables and battery
    sequences structurally substituted for its mu-variables."""
    # assignments to names that do not occur would only repeat instances
    gamma = [(x, a) for x, a in j.ctx.gamma.items() if x in j.term.fv]
    delta = [(b, a) for b, a in j.ctx.delta.items() if b in j.term.fmv]
    choices = ([inhabitants(a, depth) for _, a in gamma]
               + [battery(b, depth).seqs for _, b in delta])
    # rename first so the substitution is simultaneous even if a context
    # variable shares a name with a free variable of some inhabitant
    base = j.term
    avoid = set(base.fv) | {CANDIDATE_VAR, BOT_VAR}
    holes = []
    for x, _ in gamma:
        h = fresh(x, avoid)
        avoid.add(h)
        base = subst(base, x, Var(h))
        holes.append(h)
    out = []
    for combo in bounded_product([len(c) for c in choices]):
        t = base
        for h, opts, i in zip(holes, choices, combo):
            t = subst(t, h, opts[i])
        for (a, _), opts, i in zip(delta, choices[len(gamma):], combo[len(gamma):]):
            t = struct_subst_seq(t, a, opts[i])
        out.append(t)
    return out


def adequation_check(j: Judgement, depth: int, fuel: int = DEFAULT_FUEL,
                     engine: Engine = ENGINE) -> bool:
    return all(member_test(t, j.type, depth, fuel, engine) for t in adequation_instances(j, depth))
