import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classicnd.candidates import (
    BOT_POOL, COMBINATION_CAP, INHABITANT_CAP, I_N, adequation_check, adequation_instances,
    battery, bounded_product, inhabitants, member_test,
)
from classicnd.generate import DEFAULT_TYPE_POOL
from classicnd.grammar import parse_context, parse_term, parse_type
from classicnd.reduction import ENGINE, is_sn, reducts
from classicnd.syntax import Arg, Case, Mu, Var, alpha_eq, alpha_key, apply_seq, is_nice
from classicnd.typecheck import Contexts, check, infer

from conftest import judgements, types

P = parse_type("P")


def judgement(src, ty, gamma="", delta=""):
    return check(Contexts(parse_context(gamma), parse_context(delta)), parse_term(src),
                 parse_type(ty))


def test_battery_of_atoms_is_just_the_empty_sequence():
    for d in range(4):
        assert battery(P, d).seqs == ((),)
        assert battery(parse_type("bot"), d).seqs == ((),)


def test_battery_arrow_depth_one():
    b = battery(parse_type("P -> Q"), 1)
    assert b.seqs == ((), (Arg(Var("r")),))


def test_battery_or_depth_one():
    seqs = battery(parse_type("P \\/ Q"), 1).seqs
    assert len(seqs) == 3 and seqs[0] == ()
    plain, absurd = seqs[1][0], seqs[2][0]
    assert isinstance(plain, Case) and plain.left == Var(plain.left_var)
    assert plain.right == Var(plain.right_var)
    # the second case ignores the injected value in both branches
    assert plain.left_var not in absurd.left.fv and absurd.left == absurd.right


def test_battery_and_depth_one():
    seqs = battery(parse_type("P /\\ Q"), 1).seqs
    assert [len(s) for s in seqs] == [0, 1, 1]


def test_battery_rejects_negative_depth():
    with pytest.raises(ValueError):
        battery(P, -1)


@pytest.mark.parametrize("ty", DEFAULT_TYPE_POOL, ids=str)
@pytest.mark.parametrize("depth", [0, 1, 2])
def test_battery_invariants(ty, depth):
    b = battery(ty, depth)
    assert () in b.seqs
    assert b.keys() <= battery(ty, depth + 1).keys()
    for seq in b.seqs:
        assert is_nice(seq)
        assert all(is_sn(e) for e in seq)
        assert not any(e.fmv for e in seq if isinstance(e, Arg))


@given(types, st.integers(0, 2))
@settings(max_examples=60, deadline=None)
def test_battery_invariants_on_arbitrary_types(ty, depth):
    b = battery(ty, depth)
    assert () in b.seqs
    assert b.keys() <= battery(ty, depth + 1).keys()
    assert all(is_nice(s) for s in b.seqs)


def test_inhabitants_examples():
    assert inhabitants(P, 0) == (Var("r"),)
    mus = [t for t in inhabitants(P, 1) if isinstance(t, Mu)]
    assert any(alpha_eq(m, parse_term("mu a:P. z")) for m in mus)
    assert any(alpha_eq(t, parse_term("\\x:P. x")) for t in inhabitants(parse_type("P -> P"), 2))


@pytest.mark.parametrize("ty", DEFAULT_TYPE_POOL, ids=str)
def test_inhabitants_are_typed_and_grow_with_depth(ty):
    ctx = Contexts({"r": ty, "z": parse_type("bot")}, {})
    for d in range(3):
        found = inhabitants(ty, d)
        assert len(found) <= INHABITANT_CAP
        assert found == inhabitants(ty, d + 1)[:len(found)]
        for t in found:
            assert infer(ctx, t) == ty and not t.fmv


def test_bot_pool_is_sn_and_mu_free():
    for u in BOT_POOL:
        assert is_sn(u) and not u.fmv
        assert infer(Contexts({"z": parse_type("bot")}, {}), u) == parse_type("bot")


@pytest.mark.parametrize("src, ty", [
    ("x", "P"), ("x", "P -> Q"), ("x", "P \\/ Q"), ("x", "(P -> Q) -> P"),
    ("\\x:P. x", "P -> P"),
    ("mu a:P. z", "P"),
    ("\\z:bot. mu a:P. z", "bot -> P"),
])
def test_member_examples(src, ty):
    for d in range(3):
        assert member_test(parse_term(src), parse_type(ty), d)


def test_member_test_needs_sn():
    omega = parse_term("(\\x:P. x x) (\\x:P. x x)")
    assert not member_test(omega, P, 0, fuel=200)


def test_interpretation_wraps_the_module_functions():
    t = parse_type("P -> Q")
    assert I_N.orthogonal(t, 2) == battery(t, 2)
    assert I_N.inhabitants(t, 2) == inhabitants(t, 2)


def test_bounded_product_order_and_cap():
    assert bounded_product([2, 2]) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert bounded_product([]) == [()]
    assert bounded_product([3, 0]) == []
    combos = bounded_product([8, 8, 8])
    assert len(combos) == COMBINATION_CAP
    # small indices of every factor come first: 4**3 == 64
    assert set(combos) == {(i, j, k) for i in range(4) for j in range(4) for k in range(4)}


@pytest.mark.parametrize("src, ty, gamma, delta", [
    ("\\z:bot. mu a:P. z", "bot -> P", "", ""),
    ("x", "P", "x:P", ""),
    ("\\x:(P->Q)->P. mu a:P. [a] (x (\\y:P. mu b:Q. [a] y))", "((P->Q)->P)->P", "", ""),
    ("[a1] x1", "bot", "x1:P", "a1:P"),
    ("<z, r>", "P /\\ Q", "z:P, r:Q", ""),
])
def test_adequation_examples(src, ty, gamma, delta):
    assert adequation_check(judgement(src, ty, gamma, delta), 2)


def test_adequation_at_depth_zero_is_sn_of_the_instance():
    j = judgement("(\\x:P. x) ((\\y:P. y) (mu a:P. [a] ((\\q:P. q) w)))", "P", "w:P")
    [t] = adequation_instances(j, 0)
    assert alpha_eq(t, parse_term("(\\x:P. x) ((\\y:P. y) (mu a:P. [a] ((\\q:P. q) r)))"))
    assert adequation_check(j, 0) and is_sn(t)
    closed = judgement("(\\x:P -> P. x) (\\y:P. y)", "P -> P")
    assert [alpha_key(t) for t in adequation_instances(closed, 0)] == [alpha_key(closed.term)]


def test_adequation_substitutes_simultaneously():
    # z and r are also the names inhabitants use for their own free variables
    j = judgement("<z, r>", "P /\\ Q", "z:P, r:Q")
    for t in adequation_instances(j, 1):
        assert infer(Contexts({"r": P, "z": parse_type("bot")}, {}), t.fst) == P


def test_adequation_only_varies_names_that_occur():
    j = judgement("x1", "P", "x1:P, x2:Q")
    assert len(adequation_instances(j, 1)) == len(inhabitants(P, 1))


@given(judgements)
@settings(max_examples=60, deadline=None)
def test_adequation_on_samples(j):
    assert adequation_check(j, 1)


@given(judgements)
@settings(max_examples=60, deadline=None)
def test_membership_is_closed_under_reduction(j):
    if not j.ctx.delta and member_test(j.term, j.type, 2):
        todo, seen = [j.term], set()
        while todo:
            t = todo.pop()
            if alpha_key(t) in seen:
                continue
            seen.add(alpha_key(t))
            assert member_test(t, j.type, 2)
            todo.extend(reducts(t))


@given(judgements)
@settings(max_examples=60, deadline=None)
def test_membership_implies_sn_and_is_monotone_in_depth(j):
    for d in range(3):
        if member_test(j.term, j.type, d + 1):
            assert member_test(j.term, j.type, d)
            assert is_sn(j.term)


def test_member_test_against_a_fresh_engine_agrees():
    from classicnd.reduction import Engine
    t, ty = parse_term("\\x:P \\/ Q. x"), parse_type("(P \\/ Q) -> P \\/ Q")
    assert member_test(t, ty, 2, engine=Engine()) == member_test(t, ty, 2, engine=ENGINE)
    for seq in battery(ty, 2).seqs:
        assert is_sn(apply_seq(t, seq))
