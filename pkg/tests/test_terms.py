import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uadom.errors import EvaluationError, ParseError
from uadom.library import SEMIGROUP, GROUP, semilattice2
from uadom.algebra import enumerate_homomorphisms, enumerate_models
from uadom.library import SEMIGROUP_IDS
from uadom.terms import (
    App,
    Gen,
    Signature,
    Var,
    app,
    depth,
    evaluate,
    format_term,
    parse_term,
    substitute,
    variables,
)

SIG = Signature.of(("mul", 2), ("inv", 1), ("e", 0))


def terms(max_leaves=12):
    leaves = st.one_of(st.sampled_from([Var("x"), Var("y"), Var("z")]), st.just(App("e")))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda a, b: app("mul", a, b), sub, sub),
            st.builds(lambda a: app("inv", a), sub),
        ),
        max_leaves=max_leaves,
    )


def test_parse_variable():
    assert parse_term("x", SEMIGROUP) == Var("x")


def test_parse_application():
    assert parse_term("(mul x y)", SEMIGROUP) == App("mul", (Var("x"), Var("y")))


def test_arity_mismatch_reports_offset():
    with pytest.raises(ParseError) as err:
        parse_term("(mul x)", SEMIGROUP)
    assert "arity" in str(err.value)
    assert err.value.offset == 0


def test_unknown_operation_offset():
    with pytest.raises(ParseError) as err:
        parse_term("(mul x (foo y))", SEMIGROUP)
    assert err.value.offset == 8


def test_unbalanced():
    with pytest.raises(ParseError):
        parse_term("(mul x y", SEMIGROUP)
    with pytest.raises(ParseError):
        parse_term("(mul x y))", SEMIGROUP)


def test_offsets_are_bytes():
    with pytest.raises(ParseError) as err:
        parse_term("(mul\u00a0x (bar y))", SEMIGROUP)
    # the no-break space is two bytes in UTF-8
    assert err.value.offset == 9


def test_constants_parse_bare_or_parenthesised():
    assert parse_term("e", GROUP) == App("e")
    assert parse_term("(e)", GROUP) == App("e")
    assert format_term(App("e")) == "e"


def test_tagged_generators():
    t = parse_term("(mul L:3 R:0)", SEMIGROUP, tagged=True)
    assert t == app("mul", Gen("L", 3), Gen("R", 0))
    assert format_term(t) == "(mul L:3 R:0)"


def test_depth_limit():
    text = "(inv " * 70 + "x" + ")" * 70
    with pytest.raises(ParseError):
        parse_term(text, SIG)
    assert depth(parse_term(text, SIG, max_depth=100)) == 70


def test_deep_terms_do_not_recurse():
    t = Var("x")
    for _ in range(5000):
        t = app("inv", t)
    assert depth(t) == 5000
    assert evaluate(t, _Z2(), {"x": 1}) == 1


class _Z2:
    def apply(self, op, args):
        return {"inv": lambda a: a, "mul": lambda a, b: (a + b) % 2, "e": lambda: 0}[op](*args)


@given(terms())
def test_print_parse_round_trip(t):
    assert parse_term(format_term(t), SIG) == t
    assert format_term(parse_term(format_term(t), SIG)) == format_term(t)


def test_evaluate_examples():
    assert evaluate(Var("x"), semilattice2(), {"x": 1}) == 1
    assert evaluate(parse_term("(mul x y)", SEMIGROUP), semilattice2(), {"x": 0, "y": 1}) == 0
    with pytest.raises(EvaluationError):
        evaluate(Var("q"), semilattice2(), {})


def test_associativity_agrees_on_every_3_element_semigroup():
    lhs = parse_term("(mul (mul x y) z)", SEMIGROUP)
    rhs = parse_term("(mul x (mul y z))", SEMIGROUP)
    for A in enumerate_models(SEMIGROUP, 3, SEMIGROUP_IDS):
        for x in range(3):
            for y in range(3):
                for z in range(3):
                    env = {"x": x, "y": y, "z": z}
                    assert evaluate(lhs, A, env) == evaluate(rhs, A, env)


def test_substitute_examples():
    yy = parse_term("(mul y y)", SEMIGROUP)
    assert substitute(Var("x"), {"x": yy}) == yy
    t = parse_term("(mul x y)", SEMIGROUP)
    assert substitute(t, {}) == t
    # simultaneous, not sequential
    assert substitute(t, {"x": Var("y"), "y": Var("x")}) == parse_term("(mul y x)", SEMIGROUP)


def test_substitute_then_evaluate_matches_composed_assignment():
    rng = random.Random(7)
    A = next(iter(enumerate_models(SEMIGROUP, 3, SEMIGROUP_IDS)))
    pool = [parse_term(s, SEMIGROUP) for s in ("x", "y", "(mul x y)", "(mul y (mul x x))", "(mul (mul y x) y)")]
    for _ in range(100):
        t = rng.choice(pool)
        subst = {"x": rng.choice(pool), "y": rng.choice(pool)}
        env = {"x": rng.randrange(3), "y": rng.randrange(3)}
        composed = {v: evaluate(s, A, env) for v, s in subst.items()}
        assert evaluate(substitute(t, subst), A, env) == evaluate(t, A, composed)


@settings(max_examples=50)
@given(terms(6), terms(6), terms(6))
def test_substitution_composes(t, s1, s2):
    sigma = {"x": s1}
    tau = {"x": s2, "y": Var("z")}
    composed = {v: substitute(s, tau) for v, s in sigma.items()}
    for v, s in tau.items():
        composed.setdefault(v, s)
    assert substitute(substitute(t, sigma), tau) == substitute(t, composed)


def test_homomorphism_law():
    A = semilattice2()
    t = parse_term("(mul x (mul y x))", SEMIGROUP)
    for C in enumerate_models(SEMIGROUP, 2, SEMIGROUP_IDS):
        for f in enumerate_homomorphisms(A, C):
            for x in range(2):
                for y in range(2):
                    assert f[evaluate(t, A, {"x": x, "y": y})] == evaluate(t, C, {"x": f[x], "y": f[y]})


def test_variables_first_occurrence_order():
    assert variables(parse_term("(mul y (mul x y))", SEMIGROUP)) == ["y", "x"]


def test_signature_rejects_duplicates():
    with pytest.raises(ValueError):
        Signature.of(("mul", 2), ("mul", 1))
