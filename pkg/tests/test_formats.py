import pytest
from hypothesis import given, settings, strategies as st

from uadom.algebra import FiniteAlgebra, make_subalgebra
from uadom.errors import ParseError
from uadom.formats import (
    format_algebra,
    format_array,
    format_collection,
    format_identities,
    load_algebra,
    parse_algebra,
    parse_array_text,
    parse_collection,
    parse_identities,
)
from uadom.library import GROUP, GROUP_IDS, SEMIGROUP, SEMIGROUP_IDS, cyclic_group, heisenberg
from uadom.scenarios import data_path

Z3 = """\
algebra size=3 name=Z3
op mul arity=2
op inv arity=1
op e arity=0
table mul
0 1 2
1 2 0
2 0 1
table inv
0 2 1
table e
0   # identity element
sub 0
"""


def test_parse_algebra():
    f = parse_algebra(Z3)
    assert f.algebra.size == 3
    assert f.algebra.apply("mul", (2, 2)) == 1
    assert f.B.members == {0}


def test_algebra_round_trip():
    G = heisenberg(3)
    B = make_subalgebra(G, [0, 1, 2])
    f = parse_algebra(format_algebra(G, [B]))
    assert f.algebra == G and f.B == B


@settings(max_examples=50)
@given(st.lists(st.integers(0, 2), min_size=9, max_size=9))
def test_random_table_round_trip(cells):
    A = FiniteAlgebra.from_tables(SEMIGROUP, 3, {"mul": cells})
    assert parse_algebra(format_algebra(A)).algebra == A


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("algebra size=x\n", 1),
        ("algebra size=2\nop mul arity=2\ntable mul\n0 1\n1 zero\n", 5),
        ("algebra size=2\nop mul arity=2\ntable add\n", 3),
        ("algebra size=2\nop mul arity=2\nbogus\n", 3),
        ("algebra size=2\nop mul arity=2\ntable mul\n0 0\n0 0\nsub 1\n", 6),
        ("algebra size=2\nop mul arity=2\ntable mul\n0 0\n0 3\n", 5),
    ],
)
def test_algebra_errors_carry_lines(text, line):
    with pytest.raises(ParseError) as info:
        parse_algebra(text)
    assert info.value.line == line


def test_subalgebra_must_be_closed():
    text = "algebra size=2\nop mul arity=2\ntable mul\n0 1\n1 0\nsub 1\n"
    with pytest.raises(ParseError) as info:
        parse_algebra(text)
    assert info.value.line == 6


def test_bundled_fixtures_load():
    assert load_algebra(data_path("zigzag.alg")).algebra.size == 5
    assert load_algebra(data_path("heisenberg3.alg")).algebra == heisenberg(3)


def test_identities():
    ids = parse_identities("(mul (mul x y) z) = (mul x (mul y z))\n# comment\n", SEMIGROUP)
    assert tuple(ids) == SEMIGROUP_IDS
    assert parse_identities(format_identities(GROUP_IDS), GROUP) == list(GROUP_IDS)
    with pytest.raises(ParseError) as info:
        parse_identities("x = x\n(mul x) = x\n", SEMIGROUP)
    assert info.value.line == 2 and info.value.offset is not None
    with pytest.raises(ParseError) as info:
        parse_identities("x = y = z\n", SEMIGROUP)
    assert info.value.line == 1


def test_bundled_identity_files():
    text = data_path("semigroup.ids").read_text()
    assert tuple(parse_identities(text, SEMIGROUP)) == SEMIGROUP_IDS


def test_collections():
    names = ("a", "b", "c")
    masks = parse_collection("{}\na,b\n{a, c}\n", names)
    assert masks == [0, 3, 5]
    assert parse_collection(format_collection(masks, names), names) == masks
    with pytest.raises(ParseError) as info:
        parse_collection("{}\na,z\n", names)
    assert info.value.line == 2


def test_array_format():
    text = data_path("commutator3.arr").read_text()
    arr = parse_array_text(text, GROUP)
    assert arr.m == 2 and arr.nsig == (1, 1)
    assert parse_array_text(format_array(arr), GROUP) == arr


def test_array_errors():
    with pytest.raises(ParseError) as info:
        parse_array_text("array m=2 sig=1\n", SEMIGROUP)
    assert info.value.line == 1
    head = "array m=1 sig=1\nW1 = a1\n"
    with pytest.raises(ParseError) as info:
        parse_array_text(head + "w123 = x1\n", SEMIGROUP)
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        parse_array_text(head, SEMIGROUP)
    assert "missing" in info.value.message
    with pytest.raises(ParseError) as info:
        parse_array_text(head + "w11 = (mul x1\n", SEMIGROUP)
    assert info.value.line == 3
    assert parse_array_text(head + "w1_1 = x1\n", SEMIGROUP).m == 1
