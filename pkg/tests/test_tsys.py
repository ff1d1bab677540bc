import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from uadom.errors import BudgetExceeded
from uadom.formats import parse_collection
from uadom.scenarios import data_path
from uadom.tsys import (
    GroundSet,
    PowersetPartition,
    SubsetCollection,
    all_transfer_systems_brute,
    census,
    check_pre_transfer,
    dominion_witness,
    extract_chain,
    induced_system,
    is_transfer_system,
    least_closure,
    principal_system,
    set_partitions,
    submasks,
    validate_chain,
)

ABCDE = GroundSet(tuple("abcde"))


def example_collection():
    text = data_path("example47.txt").read_text()
    return SubsetCollection(ABCDE, frozenset(parse_collection(text, ABCDE.names)))


def powerset(g):
    return SubsetCollection(g, frozenset(range(g.full + 1)))


# -- naive oracles over python sets ------------------------------------------

def naive_pre_transfer(ground, sets):
    S = frozenset(range(ground.n))
    c = {frozenset(i for i in range(ground.n) if m >> i & 1) for m in sets}
    if frozenset() not in c:
        return False
    for a, b in itertools.product(c, repeat=2):
        if a & b in c and a | b not in c:
            return False
    for t1 in c:
        subs = [frozenset(u) for r in range(len(t1)) for u in itertools.combinations(sorted(t1), r)]
        if not all(u in c or (t1 - u) in c for u in subs):
            continue
        for r in range(len(S - t1) + 1):
            for t2 in itertools.combinations(sorted(S - t1), r):
                t2 = frozenset(t2)
                if t1 | t2 in c and t2 not in c:
                    return False
    return True


def bfs_classes(ground, sets):
    """Components of the graph joining U and U + T for T in the collection, found by search."""
    seen, count = set(), 0
    for start in range(ground.full + 1):
        if start in seen:
            continue
        count += 1
        stack = [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            for t in sets:
                for v in (u | t if u & t == 0 else None, u & ~t if u & t == t else None):
                    if v is not None and v not in seen:
                        seen.add(v)
                        stack.append(v)
    return count


# -- examples -----------------------------------------------------------------

def test_powerset_is_pre_transfer_and_transfer():
    for n in range(0, 5):
        g = GroundSet.numbered(n)
        assert check_pre_transfer(powerset(g)).ok
        assert is_transfer_system(powerset(g)).is_transfer


def test_example_collection():
    c = example_collection()
    assert check_pre_transfer(c).ok
    p = least_closure(c)
    assert p.same(0, ABCDE.full)
    assert ABCDE.full in induced_system(p)
    d = is_transfer_system(c)
    assert not d.is_transfer
    assert d.witness == ABCDE.full
    assert p.class_count() == bfs_classes(ABCDE, c.members) == 19


def test_example_chain():
    c = example_collection()
    chain = extract_chain(c, 0, ABCDE.full)
    assert [ABCDE.labels(u) for u in chain] == [
        [], list("abcd"), ["d"], list("abde"), ["e"], list("abcde"),
    ]
    assert validate_chain(c, chain)
    assert not validate_chain(c, [0, ABCDE.full])


def test_singleton_principal_fails_iii():
    g = GroundSet(("a", "b"))
    res = check_pre_transfer(principal_system(g, g.mask("a")))
    assert not res.ok
    assert res.axiom == "iii"
    assert [g.labels(w) for w in res.witness] == [["a"], ["b"]]


def test_missing_empty_set_fails_i():
    g = GroundSet.numbered(2)
    assert check_pre_transfer(SubsetCollection(g, frozenset({3}))).axiom == "i"


def test_closure_of_empty_only():
    g = GroundSet.numbered(3)
    p = least_closure(SubsetCollection(g, frozenset({0})))
    assert p.class_count() == 8


def test_induced_extremes():
    g = GroundSet.numbered(3)
    total = PowersetPartition(g)
    for u in range(1, 8):
        total.union(0, u)
    assert induced_system(total).members == frozenset(range(8))
    assert induced_system(PowersetPartition(g)).members == {0}


def test_partition_representative_is_minimum():
    g = GroundSet.numbered(3)
    p = PowersetPartition(g)
    p.union(7, 5)
    p.union(5, 2)
    assert p.find(7) == 2


def test_principal_examples():
    g = GroundSet.numbered(3)
    assert principal_system(g, 0).members == frozenset(range(8))
    assert principal_system(g, g.mask(["1", "2"])).to_list() == [[], ["1", "2"], ["1", "2", "3"]]
    for n in range(0, 6):
        g = GroundSet.numbered(n)
        for V in range(g.full + 1):
            k = bin(V).count("1")
            assert len(principal_system(g, V)) == 2 ** (n - k) + (1 if V else 0)


def test_principal_systems_are_transfer_systems():
    for n in range(0, 7):
        g = GroundSet.numbered(n)
        for V in range(g.full + 1):
            if bin(V).count("1") != 1:
                assert is_transfer_system(principal_system(g, V)).is_transfer


def test_dominion_witness_examples():
    g5 = GroundSet.numbered(5)
    w = dominion_witness(g5, g5.mask(["1", "2"]))
    assert (w.n, w.m) == (5, 2)
    assert w.collection == principal_system(g5, g5.mask(["1", "2"]))
    assert w.oracle_agrees
    assert dominion_witness(g5, 0).collection == powerset(g5)
    g6 = GroundSet.numbered(6)
    V = g6.mask(["2", "4", "5"])
    w = dominion_witness(g6, V)
    assert w.relabel == {"2": 1, "4": 2, "5": 3, "1": 4, "3": 5, "6": 6}
    assert w.collection == principal_system(g6, V) and w.oracle_agrees
    with pytest.raises(ValueError):
        dominion_witness(g5, g5.mask(["3"]))


# -- exhaustive and randomized ---------------------------------------------------

def test_set_partitions_counts():
    assert [sum(1 for _ in set_partitions(k)) for k in range(7)] == [1, 1, 2, 5, 15, 52, 203]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_decision_matches_brute_force(n):
    g = GroundSet.numbered(n)
    brute = all_transfer_systems_brute(g)
    size = 1 << n
    for code in range(1 << size):
        members = frozenset(s for s in range(size) if code >> s & 1)
        assert is_transfer_system(SubsetCollection(g, members)).is_transfer == (members in brute)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_pre_transfer_matches_naive(n):
    g = GroundSet.numbered(n)
    size = 1 << n
    for code in range(1 << size):
        members = frozenset(s for s in range(size) if code >> s & 1)
        assert check_pre_transfer(SubsetCollection(g, members)).ok == naive_pre_transfer(g, members)


def test_census_values():
    report = census(4)
    counts = {n: (r["collections"], r["pre_transfer"], r["transfer"], r["pre_not_transfer"]) for n, r in report.items()}
    assert counts == {
        "0": (2, 1, 1, 0),
        "1": (4, 2, 2, 0),
        "2": (16, 5, 5, 0),
        "3": (256, 26, 25, 1),
        "4": (65536, 1166, 372, 794),
    }
    assert all(r["transfer_not_pre"] == 0 and r["closure_not_fixed"] == 0 for r in report.values())
    assert report["3"]["first_gap"] == [[], ["1", "2"], ["1", "3"], ["2", "3"], ["1", "2", "3"]]
    assert len(all_transfer_systems_brute(GroundSet.numbered(3))) == 25


def test_census_gap_witness_is_genuine():
    g = GroundSet.numbered(3)
    c = SubsetCollection.of(g, [[], ["1", "2"], ["1", "3"], ["2", "3"], ["1", "2", "3"]])
    assert naive_pre_transfer(g, c.members)
    assert c.members not in all_transfer_systems_brute(g)


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        census(5)


collections5 = st.sets(st.integers(0, 31), max_size=12).map(lambda s: frozenset(s | {0}))


@settings(max_examples=200, deadline=None)
@given(collections5)
def test_random_collections_on_five_points(members):
    c = SubsetCollection(GroundSet.numbered(5), members)
    d = is_transfer_system(c)
    assert c.members <= d.closure.members
    if d.is_transfer:
        assert check_pre_transfer(c).ok
    assert is_transfer_system(d.closure).is_transfer
    assert check_pre_transfer(c).ok == naive_pre_transfer(c.ground, members)


@settings(max_examples=100, deadline=None)
@given(collections5, collections5)
def test_least_closure_is_monotone(a, b):
    g = GroundSet.numbered(5)
    small = least_closure(SubsetCollection(g, a))
    big = least_closure(SubsetCollection(g, a | b))
    for u, v in itertools.combinations(range(32), 2):
        if small.same(u, v):
            assert big.same(u, v)


def test_submasks():
    assert sorted(submasks(0b101)) == [0, 1, 4, 5]
    assert submasks(0) == (0,)


def test_ground_set_validation():
    with pytest.raises(ValueError):
        GroundSet(("a", "a"))
    with pytest.raises(ValueError):
        ABCDE.mask(["z"])
    with pytest.raises(BudgetExceeded):
        GroundSet.of([str(i) for i in range(21)])


def test_pre_transfer_count_on_four_points_by_naive_oracle():
    g = GroundSet.numbered(4)
    count = sum(naive_pre_transfer(g, frozenset(s for s in range(16) if c >> s & 1)) for c in range(1 << 16))
    assert count == 1166
