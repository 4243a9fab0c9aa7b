from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classicnd.grammar import parse_term
from classicnd.reduction import (
    ENGINE, FuelExhausted, InvalidStep, NotStronglyNormalizing, RedexKind, ReductionStep, SN,
    Unknown, eta, eta_seq, eterm_reducts, is_sn, normal_forms, normalize,
    reduction_graph, redexes, reducts, step,
)
from classicnd.syntax import PROJ1, Arg, Var, alpha_eq, alpha_key, is_nice, subst
from classicnd.typecheck import infer

from conftest import judgements, terms
from reduction_oracle import longest, one_step

PEIRCE = "\\x:(P->Q)->P. mu a:P. [a] (x (\\y:P. mu b:Q. [a] y))"
OMEGA = "(\\x:P. x x) (\\x:P. x x)"


def keys(ts):
    return {alpha_key(t) for t in ts}


@pytest.mark.parametrize("src, kind", [
    ("(\\x:P. x) y", RedexKind.BETA),
    ("<u, v> p1", RedexKind.PROJ1),
    ("(inr[P] w) case[R]{x. x | y. y}", RedexKind.CASE2),
    ("(z case[R]{x. x | y. y}) p1", RedexKind.PERMUTATIVE),
    ("(mu a:P/\\Q. [a] z) p1", RedexKind.CLASSICAL),
])
def test_root_redex_kind(src, kind):
    assert redexes(parse_term(src)) == [ReductionStep((), kind)]


def test_redexes_are_found_everywhere():
    t = parse_term("<(\\x:P. x) y, (\\x:P. x) z>")
    assert [s.path for s in redexes(t)] == [(0,), (1,)]
    assert redexes(parse_term("mu a:P. [a] x")) == []
    assert {s.kind.family for s in redexes(parse_term("(mu a:P. [a] ((\\x:P. x) y)) v"))} == {
        "classical", "beta"}


@pytest.mark.parametrize("src, out", [
    ("(\\x:P. x) y", "y"),
    ("<u, v> p2", "v"),
    ("(inl[Q] w) case[R]{x. f x | y. g y}", "f w"),
    ("(z case[P/\\Q]{x. u | y. v}) p1", "z case[P]{x. u p1 | y. v p1}"),
    ("(mu a:P->Q. [a] f) y", "mu a:Q. [a] (f y)"),
])
def test_single_root_step(src, out):
    t = parse_term(src)
    [s] = redexes(t)
    assert alpha_eq(step(t, s), parse_term(out))


def test_classical_step_renames_binder_caught_by_argument():
    # a is free in the argument, so the binder must move out of its way
    t = parse_term("(mu a:P->Q. [a] f) ([a] y)")
    out = step(t, ReductionStep((), RedexKind.CLASSICAL))
    assert out.name != "a" and "a" in out.fmv
    assert alpha_eq(out, parse_term("mu b:Q. [b] (f ([a] y))"))


def test_permutative_step_keeps_argument_variables_free():
    t = parse_term("(z case[P->Q]{y. y | w. w}) y")
    out = step(t, ReductionStep((), RedexKind.PERMUTATIVE))
    assert alpha_eq(out, parse_term("z case[Q]{v. v y | w. w y}"))


def test_stale_steps_are_rejected():
    t = parse_term("(\\x:P. x) y")
    with pytest.raises(InvalidStep):
        step(t, ReductionStep((), RedexKind.CLASSICAL))
    with pytest.raises(InvalidStep):
        step(t, ReductionStep((0, 0, 0), RedexKind.BETA))


def test_step_label_prints_root():
    assert str(ReductionStep((), RedexKind.BETA)) == "root beta"
    assert str(ReductionStep((1, 0), RedexKind.PROJ2)) == "1.0 proj2"


@pytest.mark.parametrize("src, count", [
    ("y", 0),
    ("mu a:P. [a] x", 0),
    ("<(\\x:P. x) y, (\\x:P. x) z>", 2),
    # the outer and inner redex give the same term
    ("(\\x:P. x) ((\\x:P. x) y)", 1),
])
def test_reducts_count(src, count):
    assert len(reducts(parse_term(src))) == count


def test_normalize_examples():
    nf, trace = normalize(parse_term("(\\x:P. x) y"))
    assert nf == Var("y") and trace == [ReductionStep((), RedexKind.BETA)]
    peirce_f = parse_term(f"({PEIRCE}) f")
    expected = parse_term("mu a:P. [a] (f (\\y:P. mu b:Q. [a] y))")
    for strategy in ("leftmost-outermost", "random", "exhaustive"):
        nf, _ = normalize(peirce_f, strategy, seed=3)
        assert alpha_eq(nf, expected)
    nf, trace = normalize(parse_term("(z case[P/\\Q]{x. x | y. y}) p1"))
    assert alpha_eq(nf, parse_term("z case[P]{x. x p1 | y. y p1}"))
    assert len(trace) == 1


def test_normalize_rejects_unknown_strategy():
    with pytest.raises(ValueError):
        normalize(Var("y"), "sideways")


def test_normalize_runs_out_of_fuel_on_omega():
    with pytest.raises(FuelExhausted):
        normalize(parse_term(OMEGA), fuel=50)


@pytest.mark.parametrize("src, value", [
    ("y", 0),
    ("(\\x:P. x) y", 1),
    ("<(\\x:P. x) y, (\\x:P. x) z>", 2),
    ("(\\x:P. <x, x>) ((\\y:P. y) z)", 3),
])
def test_eta_examples(src, value):
    assert eta(parse_term(src)) == value


def test_eta_of_eterms_and_sequences():
    assert eta(PROJ1) == 0
    case = parse_term("s case[P]{x. (\\y:P. y) x | w. (\\y:P. y) ((\\y:P. y) w)}").arg
    assert eta(case) == 3
    assert eta_seq((Arg(parse_term("(\\x:P. x) y")), PROJ1, case)) == 4


def test_is_sn_examples():
    assert is_sn(Var("y"), 1) == SN(1, 0)
    assert is_sn(parse_term("(\\x:P. x) y"), 10) == SN(2, 1)
    assert is_sn(PROJ1) == SN(1, 0)


def test_is_sn_reports_unknown_instead_of_guessing():
    omega = parse_term(OMEGA)
    res = is_sn(omega, 100)
    assert isinstance(res, Unknown) and not res
    # omega reduces to itself, so with enough fuel a cycle is found
    assert is_sn(omega, 10_000) == Unknown("cycle")
    with pytest.raises(NotStronglyNormalizing):
        ENGINE.summarize(ENGINE.explore(omega))


def test_fuel_failure_leaves_engine_consistent():
    t = parse_term("(\\f:P. f (f (f y))) (\\x:P. <x, x>)")
    assert not is_sn(t, 1)
    assert is_sn(t) and eta(t) == longest(t)


def test_exhaustive_normalize_refuses_cycles():
    with pytest.raises(NotStronglyNormalizing):
        normalize(parse_term(OMEGA), "exhaustive")


def test_reduction_graph_matches_engine():
    t = parse_term("<(\\x:P. x) y, (\\x:P. x) z>")
    g = reduction_graph(t)
    assert len(g.nodes) == 4 and len(g.edges) == 4
    assert keys(g.normal_forms()) == keys([parse_term("<y, z>")])
    assert g.root_key == alpha_key(t)
    # omega is a single node with a self-loop
    g = reduction_graph(parse_term(OMEGA))
    assert len(g.nodes) == 1 and [(a, b) for a, _, b in g.edges] == [(g.root_key, g.root_key)]
    with pytest.raises(FuelExhausted):
        reduction_graph(parse_term("(\\x:P. x x x) (\\x:P. x x x)"), fuel=5)


# cross-checks against the naive reducer


@given(terms)
@settings(max_examples=400, deadline=None)
def test_one_step_agrees_with_oracle_on_raw_terms(t):
    assert keys(reducts(t)) == keys(one_step(t))


@given(judgements)
@settings(max_examples=300, deadline=None)
def test_one_step_agrees_with_oracle_on_typed_terms(j):
    assert keys(reducts(j.term)) == keys(one_step(j.term))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_eta_agrees_with_naive_longest_path(seed):
    from conftest import sample_judgement
    j = sample_judgement(seed, budget=7)
    assert eta(j.term) == longest(j.term)


# invariants over typed terms


@given(judgements)
@settings(max_examples=200, deadline=None)
def test_subject_reduction(j):
    for s in redexes(j.term):
        assert infer(j.ctx, step(j.term, s)) == j.type


@given(judgements)
@settings(max_examples=200, deadline=None)
def test_typed_terms_are_sn_and_confluent(j):
    assert is_sn(j.term)
    assert len(normal_forms(j.term)) == 1


@given(judgements)
@settings(max_examples=200, deadline=None)
def test_eta_decreases_along_every_step(j):
    for r in reducts(j.term):
        assert eta(j.term) >= eta(r) + 1


@given(judgements, st.integers(0, 1000))
@settings(max_examples=150, deadline=None)
def test_strategies_agree(j, seed):
    lo, _ = normalize(j.term)
    rnd, trace = normalize(j.term, "random", seed)
    assert alpha_eq(lo, rnd)
    assert len(trace) <= eta(j.term)


@given(judgements)
@settings(max_examples=100, deadline=None)
def test_trace_replays_to_the_normal_form(j):
    nf, trace = normalize(j.term)
    t = j.term
    for s in trace:
        t = step(t, s)
    assert t == nf and not redexes(nf)


@given(judgements)
@settings(max_examples=150, deadline=None)
def test_reducing_one_element_keeps_a_sequence_nice(j):
    seq = (Arg(j.term), parse_term("s case[P]{x. x | y. y}").arg)
    assert is_nice(seq)
    for i, e in enumerate(seq):
        for e2 in eterm_reducts(e):
            assert is_nice(seq[:i] + (e2,) + seq[i + 1:])


@given(judgements, judgements)
@settings(max_examples=100, deadline=None)
def test_substitution_commutes_with_one_step(j, k):
    x = next(iter(j.ctx.gamma), None)
    if x is None:
        return
    for r in reducts(j.term):
        assert keys([subst(r, x, k.term)]) <= keys(reducts(subst(j.term, x, k.term)))


def test_family_coverage_on_mixed_term():
    t = parse_term("((mu a:P/\\Q. [a] <(\\x:P. x) u, (inl[Q] w) case[Q]{l. v | r. r}>) p1)")
    root = ENGINE.explore(t)
    fams = Counter(k.family for k in ENGINE.summarize(root).kinds)
    assert set(fams) >= {"classical", "beta", "case"}
