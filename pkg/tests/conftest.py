import random

import pytest
from hypothesis import strategies as st

from classicnd.generate import DEFAULT_TYPE_POOL, Sampler, enumeration_contexts
from classicnd.syntax import (
    BOT, PROJ1, PROJ2, And, App, Arg, Arrow, Case, Inl, Inr, Lam, Mu, Named, Or, Pair,
    PropVar, Var,
)
from classicnd.typecheck import check

LAM_NAMES = ("x", "y", "z", "x1")
MU_NAMES = ("a", "b")

types = st.recursive(
    st.sampled_from([PropVar("P"), PropVar("Q"), BOT]),
    lambda inner: st.one_of(
        st.builds(Arrow, inner, inner), st.builds(And, inner, inner), st.builds(Or, inner, inner)),
    max_leaves=4,
)

small_types = st.sampled_from(DEFAULT_TYPE_POOL)


def _extend(children):
    lam = st.sampled_from(LAM_NAMES)
    mu = st.sampled_from(MU_NAMES)
    eterm = st.one_of(
        st.builds(Arg, children),
        st.just(PROJ1), st.just(PROJ2),
        st.builds(Case, small_types, lam, children, lam, children),
    )
    return st.one_of(
        st.builds(Lam, lam, small_types, children),
        st.builds(App, children, eterm),
        st.builds(Pair, children, children),
        st.builds(Inl, small_types, children),
        st.builds(Inr, small_types, children),
        st.builds(Mu, mu, small_types, children),
        st.builds(Named, mu, children),
    )


# raw, usually ill-typed terms
terms = st.recursive(st.builds(Var, st.sampled_from(LAM_NAMES)), _extend, max_leaves=8)

CONTEXTS = enumeration_contexts(DEFAULT_TYPE_POOL)


def sample_judgement(seed: int, budget: int = 12):
    """A typed judgement drawn by the package sampler from an integer seed."""
    rng = random.Random(seed)
    sampler = Sampler(DEFAULT_TYPE_POOL, rng)
    for _ in range(200):
        ctx, goal = rng.choice(CONTEXTS), rng.choice(DEFAULT_TYPE_POOL)
        try:
            return check(ctx, sampler.term(ctx, goal, rng.randint(1, budget)), goal)
        except Exception:
            continue
    raise RuntimeError("sampler kept failing")


judgements = st.integers(0, 2**32 - 1).map(sample_judgement)


# one pass/fail line per acceptance criterion, shown after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def acceptance_lines():
    return ACCEPTANCE_LINES


def sample_in(ctx, goal, seed: int, budget: int = 8):
    """A term of type ``goal`` in ``ctx``, or None if the sampler finds none."""
    rng = random.Random(seed)
    sampler = Sampler(DEFAULT_TYPE_POOL, rng)
    for _ in range(50):
        try:
            return check(ctx, sampler.term(ctx, goal, rng.randint(1, budget)), goal).term
        except Exception:
            continue
    return None
