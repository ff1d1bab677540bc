"""Finite algebras given by operation tables.

Elements of an algebra of size ``n`` are the integers ``0..n-1``; each
``k``-ary operation is a row-major table of length ``n**k`` with the last
argument varying fastest.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from uadom.errors import DEFAULT_BUDGET, Budget, BudgetExceeded
from uadom.terms import App, Gen, Signature, Term, Var, evaluate, format_term, ordered_variables


@dataclass(frozen=True)
class FiniteAlgebra:
    sig: Signature
    size: int
    tables: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("algebra size must be positive")
        if len(self.tables) != len(self.sig.ops):
            raise ValueError("one table per operation required")
        for (op, k), table in zip(self.sig.ops, self.tables):
            if len(table) != self.size**k:
                raise ValueError(f"table {op!r} has {len(table)} entries, expected {self.size**k}")
            if any(not 0 <= v < self.size for v in table):
                raise ValueError(f"table {op!r} has an entry outside 0..{self.size - 1}")

    @classmethod
    def from_tables(cls, sig: Signature, size: int, tables: Mapping[str, Sequence[int]], name: str = ""):
        return cls(sig, size, tuple(tuple(tables[op]) for op in sig.names), name)

    @classmethod
    def from_function(cls, sig: Signature, size: int, funcs: Mapping[str, object], name: str = ""):
        tables = {}
        for op, k in sig.ops:
            f = funcs[op]
            tables[op] = [f(*args) for args in itertools.product(range(size), repeat=k)]
        return cls.from_tables(sig, size, tables, name)

    def table(self, op: str) -> tuple[int, ...]:
        return self.tables[self.sig.names.index(op)]

    def apply(self, op: str, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.table(op)[idx]

    @property
    def elements(self) -> range:
        return range(self.size)

    def constant_values(self) -> list[int]:
        return [self.table(c)[0] for c in self.sig.constants]

    def is_closed(self, members: Iterable[int]) -> bool:
        members = set(members)
        for (op, k), table in zip(self.sig.ops, self.tables):
            for args in itertools.product(sorted(members), repeat=k):
                if self.apply(op, args) not in members:
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "ops": [[op, k] for op, k in self.sig.ops],
            "tables": {op: list(t) for op, t in zip(self.sig.names, self.tables)},
        }


@dataclass(frozen=True)
class Subalgebra:
    parent: FiniteAlgebra
    members: frozenset[int]

    def __contains__(self, a: object) -> bool:
        return a in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def variables(self, order: Iterable[str] | None = None) -> list[str]:
        return ordered_variables([self.lhs, self.rhs], order)

    def __str__(self) -> str:
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"


def make_subalgebra(alg: FiniteAlgebra, members: Iterable[int]) -> Subalgebra:
    """Wrap ``members`` as a subalgebra, checking closure."""
    members = frozenset(members)
    if not alg.is_closed(members) or not set(alg.constant_values()) <= members:
        raise ValueError(f"{sorted(members)} is not closed under the operations")
    return Subalgebra(alg, members)


# ---------------------------------------------------------------------------
# identities

def check_identity(
    alg: FiniteAlgebra,
    ident: Identity,
    budget: Budget = DEFAULT_BUDGET,
    order: Iterable[str] | None = None,
) -> dict[str, int] | None:
    """Return the lexicographically first counterexample, or ``None`` if it holds."""
    names = ident.variables(order)
    needed = alg.size ** len(names)
    if needed > budget.assignments:
        raise BudgetExceeded("assignment", budget.assignments, needed)
    for values in itertools.product(range(alg.size), repeat=len(names)):
        env = dict(zip(names, values))
        if evaluate(ident.lhs, alg, env) != evaluate(ident.rhs, alg, env):
            return env
    return None


def satisfies(alg: FiniteAlgebra, ids: Iterable[Identity], budget: Budget = DEFAULT_BUDGET) -> bool:
    return all(check_identity(alg, i, budget) is None for i in ids)


# ---------------------------------------------------------------------------
# subalgebras

def generate_subalgebra(alg: FiniteAlgebra, seed: Iterable[int]) -> Subalgebra:
    members = set(seed) | set(alg.constant_values())
    frontier = set(members)
    ops = [(op, k) for op, k in alg.sig.ops if k > 0]
    while frontier:
        found = set()
        current = sorted(members)
        for op, k in ops:
            for args in itertools.product(current, repeat=k):
                # only tuples touching the frontier can produce something new
                if not frontier.intersection(args):
                    continue
                v = alg.apply(op, args)
                if v not in members:
                    found.add(v)
        members |= found
        frontier = found
    return Subalgebra(alg, frozenset(members))


def all_subalgebras(alg: FiniteAlgebra) -> Iterator[Subalgebra]:
    """Every subalgebra, in increasing bitmask order of the member set."""
    for mask in range(1 << alg.size):
        members = [a for a in range(alg.size) if mask >> a & 1]
        if set(alg.constant_values()) <= set(members) and alg.is_closed(members):
            yield Subalgebra(alg, frozenset(members))


# ---------------------------------------------------------------------------
# homomorphisms

def enumerate_homomorphisms(
    domain: FiniteAlgebra,
    codomain: FiniteAlgebra,
    pin: Mapping[int, int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield every homomorphism extending ``pin`` as a tuple ``f`` with ``f[a]`` the image.

    Backtracks over the lowest unassigned element with images in ascending
    order, propagating every table fact whose arguments are already mapped,
    so the maps come out in lexicographic order.
    """
    if domain.sig != codomain.sig:
        raise ValueError("domain and codomain have different signatures")
    n = domain.size
    ops = [(domain.table(op), codomain.table(op), k) for op, k in domain.sig.ops]
    f = [-1] * n
    for (dt, ct, k) in ops:
        if k == 0 and not _assign(f, dt[0], ct[0]):
            return
    for a, b in (pin or {}).items():
        if not _assign(f, a, b):
            return
    if not _propagate(f, ops, n, codomain.size, [a for a in range(n) if f[a] >= 0]):
        return
    yield from _search_homs(f, ops, n, codomain.size)


def _assign(f: list[int], a: int, b: int) -> bool:
    if f[a] == -1:
        f[a] = b
        return True
    return f[a] == b


def _propagate(f, ops, n, m, queue) -> bool:
    assigned = [a for a in range(n) if f[a] >= 0]
    pending = list(queue)
    while pending:
        a = pending.pop()
        for dt, ct, k in ops:
            if k == 0:
                continue
            for pos in range(k):
                for others in itertools.product(assigned, repeat=k - 1):
                    args = others[:pos] + (a,) + others[pos:]
                    di = ci = 0
                    for x in args:
                        di = di * n + x
                        ci = ci * m + f[x]
                    r, img = dt[di], ct[ci]
                    if f[r] == -1:
                        f[r] = img
                        assigned.append(r)
                        pending.append(r)
                    elif f[r] != img:
                        return False
    return True


def _search_homs(f, ops, n, m) -> Iterator[tuple[int, ...]]:
    try:
        a = f.index(-1)
    except ValueError:
        yield tuple(f)
        return
    for b in range(m):
        g = list(f)
        g[a] = b
        if _propagate(g, ops, n, m, [a]):
            yield from _search_homs(g, ops, n, m)


def is_homomorphism(f: Sequence[int], domain: FiniteAlgebra, codomain: FiniteAlgebra) -> bool:
    for op, k in domain.sig.ops:
        for args in itertools.product(range(domain.size), repeat=k):
            if f[domain.apply(op, args)] != codomain.apply(op, [f[a] for a in args]):
                return False
    return True


# ---------------------------------------------------------------------------
# model enumeration

class _Compiled:
    """A term compiled to postfix code over a flat cell array (``-1`` = unset)."""

    def __init__(self, term: Term, var_index: Mapping[str, int], offsets: Mapping[str, int], n: int):
        self.code: list[tuple] = []
        stack: list[tuple[Term, bool]] = [(term, False)]
        while stack:
            t, expanded = stack.pop()
            if isinstance(t, Var):
                self.code.append((0, var_index[t.name]))
            elif isinstance(t, Gen):
                raise ValueError("identities may not contain tagged generators")
            elif expanded or not t.args:
                self.code.append((1, offsets[t.op], len(t.args)))
            else:
                stack.append((t, True))
                stack.extend((arg, False) for arg in reversed(t.args))
        self.n = n

    def run(self, values: Sequence[int], cells: Sequence[int]) -> int:
        """Value of the term, or ``-(cell + 1)`` for the first unset cell it needs."""
        n = self.n
        st: list[int] = []
        for ins in self.code:
            if ins[0] == 0:
                st.append(values[ins[1]])
                continue
            _, off, k = ins
            idx = 0
            if k:
                args = st[-k:]
                del st[-k:]
                for a in args:
                    idx = idx * n + a
            v = cells[off + idx]
            if v < 0:
                return -(off + idx + 1)
            st.append(v)
        return st[0]


def enumerate_models(
    sig: Signature,
    n: int,
    ids: Sequence[Identity] = (),
    *,
    prune_isomorphic: bool = False,
    budget: Budget = DEFAULT_BUDGET,
) -> Iterator[FiniteAlgebra]:
    """Yield every algebra on ``0..n-1`` satisfying ``ids`` in lexicographic table order.

    Cells are filled in signature order, row-major within a table.  Each
    identity instance (identity x assignment of its variables) is re-checked
    only when the cell it is blocked on gets a value.  With
    ``prune_isomorphic`` only the lexicographically least member of each
    isomorphism class is yielded.
    """
    if n > budget.model_size and any(k >= 2 for _, k in sig.ops):
        raise BudgetExceeded("model size", budget.model_size, n)
    offsets: dict[str, int] = {}
    total = 0
    for op, k in sig.ops:
        offsets[op] = total
        total += n**k
    instances = []
    for ident in ids:
        names = ident.variables()
        if n ** len(names) > budget.assignments:
            raise BudgetExceeded("assignment", budget.assignments, n ** len(names))
        vi = {v: i for i, v in enumerate(names)}
        lhs = _Compiled(ident.lhs, vi, offsets, n)
        rhs = _Compiled(ident.rhs, vi, offsets, n)
        for values in itertools.product(range(n), repeat=len(names)):
            instances.append((lhs, rhs, values))

    cells = [-1] * total
    watches: list[list[int]] = [[] for _ in range(total)]

    def check(inst_ids: Iterable[int], trail: list[int]) -> bool:
        for i in inst_ids:
            lhs, rhs, values = instances[i]
            a = lhs.run(values, cells)
            if a < 0:
                watches[-a - 1].append(i)
                trail.append(-a - 1)
                continue
            b = rhs.run(values, cells)
            if b < 0:
                watches[-b - 1].append(i)
                trail.append(-b - 1)
                continue
            if a != b:
                return False
        return True

    def undo(trail: list[int]) -> None:
        for c in reversed(trail):
            watches[c].pop()

    root_trail: list[int] = []
    if not check(range(len(instances)), root_trail):
        return
    perms = list(itertools.permutations(range(n))) if prune_isomorphic else []
    count = 0

    def search(c: int) -> Iterator[FiniteAlgebra]:
        nonlocal count
        if c == total:
            if prune_isomorphic and not _is_canonical(cells, sig, n, perms):
                return
            count += 1
            if count > budget.models:
                raise BudgetExceeded("model", budget.models)
            tables = tuple(tuple(cells[offsets[op]:offsets[op] + n**k]) for op, k in sig.ops)
            yield FiniteAlgebra(sig, n, tables)
            return
        waiting = watches[c]
        watches[c] = []
        for v in range(n):
            cells[c] = v
            trail: list[int] = []
            ok = check(waiting, trail)
            if ok:
                yield from search(c + 1)
            undo(trail)
        cells[c] = -1
        watches[c] = waiting

    yield from search(0)


def _is_canonical(cells: Sequence[int], sig: Signature, n: int, perms) -> bool:
    """True if no relabeling gives a lexicographically smaller table vector."""
    base = list(cells)
    for p in perms:
        img = []
        for op, k in sig.ops:
            table = _table_slice(cells, sig, n, op)
            new = [0] * (n**k)
            for args in itertools.product(range(n), repeat=k):
                i = 0
                j = 0
                for a in args:
                    i = i * n + a
                    j = j * n + p[a]
                new[j] = p[table[i]]
            img.extend(new)
        if img < base:
            return False
    return True


def _table_slice(cells, sig, n, op):
    off = 0
    for name, k in sig.ops:
        if name == op:
            return cells[off:off + n**k]
        off += n**k
    raise KeyError(op)


# ---------------------------------------------------------------------------
# the brute-force dominion over-approximation

@dataclass(frozen=True)
class Separation:
    """Homomorphisms ``f, g: A -> C`` agreeing on B but not on ``element``."""

    element: int
    codomain: FiniteAlgebra
    f: tuple[int, ...]
    g: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "codomain": self.codomain.to_dict(),
            "f": list(self.f),
            "g": list(self.g),
        }


@dataclass(frozen=True)
class DominionBound:
    members: frozenset[int]
    separations: dict[int, Separation]
    codomains_tested: int

    def __contains__(self, a: object) -> bool:
        return a in self.members


def codomain_stream(
    sig: Signature,
    ids: Sequence[Identity],
    max_c: int,
    codomains: Sequence[FiniteAlgebra] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Iterator[FiniteAlgebra]:
    """Explicit codomains first, then every model of size ``1..max_c``."""
    yield from codomains
    for size in range(1, max_c + 1):
        yield from enumerate_models(sig, size, ids, budget=budget)


def separating_pairs(
    A: FiniteAlgebra, B: Subalgebra, C: FiniteAlgebra
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs ``(f, g)`` of homomorphisms into ``C`` with equal restriction to B, f before g."""
    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = defaultdict(list)
    keys = sorted(B.members)
    for f in enumerate_homomorphisms(A, C):
        groups[tuple(f[b] for b in keys)].append(f)
    for homs in groups.values():
        for i, f in enumerate(homs):
            for g in homs[i + 1:]:
                yield f, g


def dominion_upper(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    max_c: int,
    *,
    codomains: Sequence[FiniteAlgebra] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> DominionBound:
    """Elements no tested pair of homomorphisms agreeing on B can separate.

    Every model of ``ids`` with at most ``max_c`` elements (plus any explicit
    ``codomains``) is tried.  The result contains the true dominion; each
    excluded element comes with the first separating ``(C, f, g)`` found.
    """
    remaining = set(A.elements)
    separations: dict[int, Separation] = {}
    tested = 0
    keys = sorted(B.members)
    for C in codomain_stream(A.sig, ids, max_c, codomains, budget):
        tested += 1
        groups: dict[tuple[int, ...], tuple[int, ...]] = {}
        for f in enumerate_homomorphisms(A, C):
            key = tuple(f[b] for b in keys)
            first = groups.setdefault(key, f)
            if first is f:
                continue
            for a in sorted(remaining):
                if first[a] != f[a]:
                    separations[a] = Separation(a, C, first, f)
                    remaining.discard(a)
        if not remaining:
            break
    return DominionBound(frozenset(remaining), separations, tested)
