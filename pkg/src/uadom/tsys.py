"""Transfer systems and pre-transfer systems on a finite ground set.

Subsets of an ``n``-element ground set are bit masks ``0 .. 2**n - 1``.  A
collection ``c`` is a *transfer system* when some equivalence ``~`` on
subsets makes ``T`` a member exactly when ``U ~ U | T`` for every ``U``
disjoint from ``T``.

Deciding this only needs the least such equivalence.  Let ``~0`` be the
equivalence generated by the pairs ``(U, U | T)`` for ``T`` in ``c`` and
``U`` disjoint from ``T``, and write ``I(~)`` for the collection an
equivalence induces.  Then ``c`` is contained in ``I(~0)``.  Any witness
``~`` for ``c`` contains all generating pairs, hence contains ``~0``, and
``I`` is monotone, so ``c <= I(~0) <= I(~) = c``.  Hence ``c`` is a transfer
system iff ``I(~0) = c``, and any element of ``I(~0) - c`` refutes it.
"""

from __future__ import annotations

import functools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from uadom.errors import DEFAULT_BUDGET, Budget, BudgetExceeded


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@functools.lru_cache(maxsize=4096)
def submasks(mask: int) -> tuple[int, ...]:
    """All submasks of ``mask``, in increasing order."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = []
    for combo in range(1 << len(bits)):
        sub = 0
        for k, b in enumerate(bits):
            if combo >> k & 1:
                sub |= b
        out.append(sub)
    return tuple(out)


@dataclass(frozen=True)
class GroundSet:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError("ground set labels must be unique")

    @classmethod
    def of(cls, names: Iterable[str], budget: Budget = DEFAULT_BUDGET) -> "GroundSet":
        g = cls(tuple(names))
        if len(g.names) > budget.ground_size:
            raise BudgetExceeded("ground set size", budget.ground_size, len(g.names))
        return g

    @classmethod
    def numbered(cls, n: int) -> "GroundSet":
        return cls(tuple(str(i) for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def mask(self, labels: Iterable[str]) -> int:
        index = {name: i for i, name in enumerate(self.names)}
        out = 0
        for label in labels:
            if label not in index:
                raise ValueError(f"{label!r} is not in the ground set")
            out |= 1 << index[label]
        return out

    def labels(self, mask: int) -> list[str]:
        return [self.names[i] for i in range(self.n) if mask >> i & 1]


@dataclass(frozen=True)
class SubsetCollection:
    ground: GroundSet
    members: frozenset[int]

    def __post_init__(self) -> None:
        for m in self.members:
            if m < 0 or m > self.ground.full:
                raise ValueError(f"subset {m} is not inside the ground set")

    @classmethod
    def of(cls, ground: GroundSet, subsets: Iterable[Iterable[str]]) -> "SubsetCollection":
        return cls(ground, frozenset(ground.mask(s) for s in subsets))

    def __contains__(self, mask: object) -> bool:
        return mask in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def to_list(self) -> list[list[str]]:
        return [self.ground.labels(m) for m in sorted(self.members, key=lambda m: (popcount(m), m))]


class PowersetPartition:
    """Union-find over all ``2**n`` subsets; the representative is the least mask of a class."""

    def __init__(self, ground: GroundSet):
        self.ground = ground
        self.parent = list(range(1 << ground.n))

    def find(self, u: int) -> int:
        root = u
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[u] != root:
            self.parent[u], u = root, self.parent[u]
        return root

    def union(self, u: int, v: int) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if rv < ru:
            ru, rv = rv, ru
        self.parent[rv] = ru
        return True

    def same(self, u: int, v: int) -> bool:
        return self.find(u) == self.find(v)

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for u in range(len(self.parent)):
            out.setdefault(self.find(u), []).append(u)
        return out

    def class_count(self) -> int:
        return sum(1 for u in range(len(self.parent)) if self.find(u) == u)

    def labels(self) -> tuple[int, ...]:
        return tuple(self.find(u) for u in range(len(self.parent)))


# ---------------------------------------------------------------------------
# axioms

@dataclass(frozen=True)
class AxiomResult:
    ok: bool
    axiom: str = ""
    witness: tuple[int, ...] = ()

    def to_dict(self, ground: GroundSet) -> dict:
        if self.ok:
            return {"verdict": "pass"}
        return {"verdict": "fail", "axiom": self.axiom, "witness": [ground.labels(w) for w in self.witness]}


def check_pre_transfer(c: SubsetCollection) -> AxiomResult:
    """First failure of axioms (i), (ii), (iii), each scanned in increasing mask order."""
    members = c.sorted()
    mset = c.members
    if 0 not in mset:
        return AxiomResult(False, "i", ())
    for t1 in members:
        for t2 in members:
            if (t1 & t2) in mset and (t1 | t2) not in mset:
                return AxiomResult(False, "ii", (t1, t2))
    for t1 in members:
        if not _halves_ok(t1, mset):
            continue
        for x in members:
            if x & t1 == t1 and (x & ~t1) not in mset:
                return AxiomResult(False, "iii", (t1, x & ~t1))
    return AxiomResult(True)


def _halves_ok(t1: int, mset: frozenset[int]) -> bool:
    """Every proper subset U of t1 has U or t1 - U in the collection."""
    for u in submasks(t1):
        if u != t1 and u not in mset and (t1 & ~u) not in mset:
            return False
    return True


# ---------------------------------------------------------------------------
# closure and decision

def least_closure(c: SubsetCollection) -> PowersetPartition:
    p = PowersetPartition(c.ground)
    full = c.ground.full
    for t in c.sorted():
        for u in submasks(full & ~t):
            p.union(u, u | t)
    return p


def induced_system(p: PowersetPartition) -> SubsetCollection:
    full = p.ground.full
    labels = p.labels()
    out = []
    for t in range(full + 1):
        if all(labels[u] == labels[u | t] for u in submasks(full & ~t)):
            out.append(t)
    return SubsetCollection(p.ground, frozenset(out))


@dataclass(frozen=True)
class Decision:
    is_transfer: bool
    closure: SubsetCollection
    partition: PowersetPartition
    witness: int | None = None

    def to_dict(self) -> dict:
        g = self.closure.ground
        out = {
            "verdict": "yes" if self.is_transfer else "no",
            "classes": self.partition.class_count(),
            "closure": self.closure.to_list(),
        }
        if self.witness is not None:
            out["witness"] = g.labels(self.witness)
        return out


def is_transfer_system(c: SubsetCollection) -> Decision:
    """Yes iff the least closure induces exactly ``c``; otherwise the largest extra member."""
    p = least_closure(c)
    star = induced_system(p)
    if not c.members <= star.members:
        raise AssertionError("closure lost a member; the least-closure argument is violated")
    extra = star.members - c.members
    if not extra:
        return Decision(True, star, p)
    witness = max(extra, key=lambda m: (popcount(m), m))
    return Decision(False, star, p, witness)


def generator_steps(c: SubsetCollection, u: int) -> Iterator[int]:
    """Subsets one generating pair away from ``u``."""
    for t in c.sorted():
        if t == 0:
            continue
        if u & t == 0:
            yield u | t
        elif u & t == t:
            yield u & ~t


def extract_chain(c: SubsetCollection, start: int, goal: int) -> list[int] | None:
    """Shortest chain of generating pairs from ``start`` to ``goal`` (breadth first)."""
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            chain = []
            while u is not None:
                chain.append(u)
                u = prev[u]
            return chain[::-1]
        for v in generator_steps(c, u):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    return None


def validate_chain(c: SubsetCollection, chain: Sequence[int]) -> bool:
    """Each consecutive pair differs by adding or removing a member disjoint from the smaller set."""
    for u, v in zip(chain, chain[1:]):
        small, big = (u, v) if u & v == u else (v, u)
        if small & big != small or (big & ~small) not in c.members:
            return False
    return True


# ---------------------------------------------------------------------------
# principal systems and the integer witness

def principal_system(ground: GroundSet, V: int) -> SubsetCollection:
    out = {0}
    for t in range(ground.full + 1):
        if t & V == V:
            out.add(t)
    return SubsetCollection(ground, frozenset(out))


@dataclass(frozen=True)
class DominionWitness:
    n: int
    m: int
    relabel: dict[str, int]
    collection: SubsetCollection
    oracle_agrees: bool

    def to_dict(self) -> dict:
        return {
            "model": {"n": self.n, "m": self.m, "B": f"multiples of the product of the first {self.m} primes"},
            "relabel": dict(self.relabel),
            "collection": self.collection.to_list(),
            "oracle_agrees": self.oracle_agrees,
        }


def dominion_witness(ground: GroundSet, V: int, *, oracle: bool = True) -> DominionWitness:
    """Realise ``T(V)`` as a transferable collection in the integer model.

    ``V`` is relabelled onto the first ``|V|`` primes keeping ground order,
    the remaining labels follow in order.  ``oracle`` additionally runs the
    partition-by-partition search for every subset.
    """
    from uadom.model import ModelInstance, model_transferable, model_transferable_bfs

    m = popcount(V)
    if m == 1:
        raise ValueError("a singleton V does not give a transfer system")
    order = [i for i in range(ground.n) if V >> i & 1] + [i for i in range(ground.n) if not V >> i & 1]
    relabel = {ground.names[i]: k + 1 for k, i in enumerate(order)}
    inst = ModelInstance(ground.n, m)
    members = set()
    agrees = True
    for t in range(ground.full + 1):
        T = [relabel[name] for name in ground.labels(t)]
        ok = model_transferable(inst, T)
        if oracle and model_transferable_bfs(inst, T) != ok:
            agrees = False
        if ok:
            members.add(t)
    coll = SubsetCollection(ground, frozenset(members))
    if coll != principal_system(ground, V):
        raise AssertionError("model collection differs from the principal system")
    return DominionWitness(ground.n, m, relabel, coll, agrees)


# ---------------------------------------------------------------------------
# census

def _census_chunk(args: tuple[int, int, int]) -> dict:
    n, lo, hi = args
    ground = GroundSet.numbered(n)
    size = 1 << n
    pre = tsys = pre_not_t = t_not_pre = not_fixed = 0
    smallest_gap = None
    fixed: dict[frozenset[int], bool] = {}
    for code in range(lo, hi):
        members = frozenset(s for s in range(size) if code >> s & 1)
        c = SubsetCollection(ground, members)
        is_pre = check_pre_transfer(c).ok
        decision = is_transfer_system(c)
        pre += is_pre
        tsys += decision.is_transfer
        if is_pre and not decision.is_transfer:
            pre_not_t += 1
            if smallest_gap is None:
                smallest_gap = code
        if decision.is_transfer and not is_pre:
            t_not_pre += 1
        star = decision.closure.members
        if star not in fixed:
            fixed[star] = is_transfer_system(decision.closure).is_transfer
        if not fixed[star]:
            not_fixed += 1
    return {
        "pre_transfer": pre,
        "transfer": tsys,
        "pre_not_transfer": pre_not_t,
        "transfer_not_pre": t_not_pre,
        "closure_not_fixed": not_fixed,
        "first_gap": smallest_gap,
    }


def census(max_n: int, jobs: int = 1) -> dict:
    """Exhaustive counts over every collection of subsets of an ``n``-set, ``n = 0..max_n``.

    Work is split into fixed chunks and merged in chunk order, so the result
    does not depend on ``jobs``.
    """
    if max_n > 4:
        raise BudgetExceeded("census ground size", 4, max_n)
    report = {}
    for n in range(max_n + 1):
        total = 1 << (1 << n)
        step = max(1, total // 64)
        chunks = [(n, lo, min(total, lo + step)) for lo in range(0, total, step)]
        if jobs > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(_census_chunk, chunks))
        else:
            parts = [_census_chunk(ch) for ch in chunks]
        merged = {"collections": total}
        for key in ("pre_transfer", "transfer", "pre_not_transfer", "transfer_not_pre", "closure_not_fixed"):
            merged[key] = sum(p[key] for p in parts)
        gaps = [p["first_gap"] for p in parts if p["first_gap"] is not None]
        ground = GroundSet.numbered(n)
        merged["first_gap"] = (
            None
            if not gaps
            else [ground.labels(s) for s in range(1 << n) if min(gaps) >> s & 1]
        )
        report[str(n)] = merged
    return report


# ---------------------------------------------------------------------------
# brute force over all equivalences (small ground sets only)

def set_partitions(k: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``k``: every partition of ``range(k)`` once."""
    if k == 0:
        yield ()
        return
    labels = [0] * k

    def rec(i: int, top: int):
        if i == k:
            yield tuple(labels)
            return
        for v in range(top + 2):
            labels[i] = v
            yield from rec(i + 1, max(top, v))

    labels[0] = 0
    yield from rec(1, 0)


def all_transfer_systems_brute(ground: GroundSet) -> set[frozenset[int]]:
    """Every collection induced by some equivalence on subsets (Bell(2**n) equivalences)."""
    if ground.n > 3:
        raise BudgetExceeded("brute-force ground size", 3, ground.n)
    full = ground.full
    out = set()
    for labels in set_partitions(full + 1):
        members = frozenset(
            t for t in range(full + 1) if all(labels[u] == labels[u | t] for u in submasks(full & ~t))
        )
        out.add(members)
    return out
