"""Semi-deciding equalities in the amalgamated coproduct of A with itself over B.

The positive side is congruence closure over a term graph whose leaves are
the tagged generators ``L:a`` and ``R:a``.  Seeded relations are the table
facts of each copy of ``A`` and the amalgamation facts ``L:b = R:b``; each
instantiation round then adds identity instances by matching either side
of an identity against the current graph (equality saturation).  Every
union is logged with the relation that caused it, so a ``Proven`` verdict
is always backed by an explicit derivation.

The negative side searches for a pair of homomorphisms ``f, g: A -> C``
agreeing on ``B`` that separates the two terms; the universal property of
the coproduct makes such a witness a sound refutation.
"""

from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from uadom.algebra import (
    FiniteAlgebra,
    Identity,
    Separation,
    Subalgebra,
    codomain_stream,
    enumerate_homomorphisms,
)
from uadom.errors import DEFAULT_BUDGET, Budget, BudgetExceeded
from uadom.terms import LEFT, RIGHT, App, Gen, Term, Var, evaluate, format_term, variables

DEFAULT_DEPTH = 2


class Verdict(enum.Enum):
    PROVEN = "proven"
    DISPROVEN = "disproven"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Outcome:
    verdict: Verdict
    reason: str = ""
    separation: Separation | None = None
    f: tuple | None = None
    g: tuple | None = None
    codomain: FiniteAlgebra | None = None

    @property
    def proven(self) -> bool:
        return self.verdict is Verdict.PROVEN

    @property
    def disproven(self) -> bool:
        return self.verdict is Verdict.DISPROVEN

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.verdict.value}
        if self.reason:
            out["reason"] = self.reason
        if self.codomain is not None:
            out["witness"] = {
                "codomain": self.codomain.to_dict(),
                "f": list(self.f),
                "g": list(self.g),
            }
        return out


@dataclass
class Merge:
    a: int
    b: int
    reason: tuple


@dataclass
class CoproductPresentation:
    """Term graph with union-find over its nodes.

    Class representatives are always the lowest node index in the class, so
    closure results do not depend on hash ordering.
    """

    A: FiniteAlgebra
    B: Subalgebra
    ids: tuple[Identity, ...]
    depth: int
    budget: Budget = DEFAULT_BUDGET
    nodes: list[tuple] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    audit: list[Merge] = field(default_factory=list)
    rounds_done: int = 0
    counts: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    _memo: dict[tuple, int] = field(default_factory=dict)
    _uses: list[list[int]] = field(default_factory=list)
    _members: list[list[int]] = field(default_factory=list)
    _by_op: dict[str, list[int]] = field(default_factory=lambda: defaultdict(list))
    _pending: list[tuple[int, int, tuple]] = field(default_factory=list)

    # -- union-find -------------------------------------------------------

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def _new_node(self, key: tuple) -> int:
        if len(self.nodes) >= self.budget.nodes:
            raise BudgetExceeded("node", self.budget.nodes)
        i = len(self.nodes)
        self.nodes.append(key)
        self.parent.append(i)
        self._uses.append([])
        self._members.append([i])
        self._memo[self._canonical(key)] = i
        if key[0] == "app":
            self._by_op[key[1]].append(i)
            for c in key[2]:
                self._uses[self.find(c)].append(i)
        return i

    def _canonical(self, key: tuple) -> tuple:
        if key[0] == "app":
            return ("app", key[1], tuple(self.find(c) for c in key[2]))
        return key

    def generator(self, side: str, a: int) -> int:
        key = ("gen", side, a)
        i = self._memo.get(key)
        return i if i is not None else self._new_node(key)

    def apply(self, op: str, children: Sequence[int]) -> int:
        key = ("app", op, tuple(self.find(c) for c in children))
        i = self._memo.get(key)
        if i is not None:
            return self.find(i)
        return self._new_node(key)

    def add_term(self, t: Term, env: dict[str, int] | None = None) -> int:
        """Insert ``t`` (variables bound to class ids via ``env``); return its class."""

        def leaf(s: Term) -> int:
            if isinstance(s, Gen):
                if not 0 <= s.element < self.A.size:
                    raise ValueError(f"generator {s} is not an element of A")
                return self.generator(s.side, s.element)
            if env is None or s.name not in env:
                raise ValueError(f"free variable {s.name!r} in coproduct term")
            return env[s.name]

        from uadom.terms import fold

        return self.find(fold(t, leaf, lambda s, ch: self.apply(s.op, ch)))

    def union(self, a: int, b: int, reason: tuple) -> None:
        self._pending.append((a, b, reason))
        self._close()

    def _close(self) -> None:
        while self._pending:
            a, b, reason = self._pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if rb < ra:
                ra, rb = rb, ra
            self.audit.append(Merge(a, b, reason))
            self.counts["merges"] += 1
            self.parent[rb] = ra
            self._members[ra].extend(self._members[rb])
            self._members[rb] = []
            moved = self._uses[rb]
            self._uses[rb] = []
            for p in moved:
                key = self._canonical(self.nodes[p])
                q = self._memo.get(key)
                if q is None:
                    self._memo[key] = p
                elif self.find(q) != self.find(p):
                    self._pending.append((p, q, ("congruence", p, q)))
                self._uses[ra].append(p)

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def classes(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if self.parent[i] == i]

    # -- seeding and saturation -------------------------------------------

    def seed(self) -> None:
        A = self.A
        for side in (LEFT, RIGHT):
            for a in A.elements:
                self.generator(side, a)
        for side in (LEFT, RIGHT):
            for op, k in A.sig.ops:
                for args in itertools.product(A.elements, repeat=k):
                    node = self.apply(op, [self.generator(side, a) for a in args])
                    result = self.generator(side, A.apply(op, args))
                    self.counts["table_facts"] += 1
                    self.union(node, result, ("table", side, op, args))
        for b in sorted(self.B.members):
            self.counts["amalgamation_facts"] += 1
            self.union(self.generator(LEFT, b), self.generator(RIGHT, b), ("amalgamation", b))

    def saturate_round(self) -> int:
        """One instantiation round; returns the number of new identity instances."""
        classes = self.classes()
        found: list[tuple[int, int, dict[str, int]]] = []
        seen: set[tuple] = set()
        for idx, ident in enumerate(self.ids):
            for direction, (pat, other) in enumerate(((ident.lhs, ident.rhs), (ident.rhs, ident.lhs))):
                free = [v for v in variables(other) if v not in variables(pat)]
                for cls, env in self._matches(pat, classes):
                    for extra in itertools.product(classes, repeat=len(free)):
                        full = dict(env)
                        full.update(zip(free, extra))
                        key = (idx, tuple(sorted(full.items())))
                        if key in seen:
                            continue
                        seen.add(key)
                        found.append((idx, direction, full))
        added = 0
        for idx, direction, env in found:
            ident = self.ids[idx]
            left = self.add_term(ident.lhs, env)
            right = self.add_term(ident.rhs, env)
            if not self.same(left, right):
                added += 1
            self.counts["identity_instances"] += 1
            self.union(left, right, ("identity", idx, tuple(sorted(env.items()))))
        self.rounds_done += 1
        return added

    def _matches(self, pat: Term, classes: Sequence[int]) -> Iterator[tuple[int, dict[str, int]]]:
        if isinstance(pat, Var):
            for c in classes:
                yield c, {pat.name: c}
            return
        if isinstance(pat, Gen):
            c = self.find(self.generator(pat.side, pat.element))
            yield c, {}
            return
        for node in list(self._by_op.get(pat.op, ())):
            cls = self.find(node)
            for env in self._match_node(pat, node, {}):
                yield cls, env

    def _match_class(self, pat: Term, cls: int, env: dict[str, int]) -> Iterator[dict[str, int]]:
        cls = self.find(cls)
        if isinstance(pat, Var):
            bound = env.get(pat.name)
            if bound is None:
                yield {**env, pat.name: cls}
            elif self.find(bound) == cls:
                yield env
            return
        if isinstance(pat, Gen):
            if self.find(self.generator(pat.side, pat.element)) == cls:
                yield env
            return
        for node in list(self._members[cls]):
            key = self.nodes[node]
            if key[0] == "app" and key[1] == pat.op and len(key[2]) == len(pat.args):
                yield from self._match_node(pat, node, env)

    def _match_node(self, pat: App, node: int, env: dict[str, int]) -> Iterator[dict[str, int]]:
        children = self.nodes[node][2]
        if len(children) != len(pat.args):
            return
        envs = [env]
        for sub, child in zip(pat.args, children):
            envs = [e2 for e in envs for e2 in self._match_class(sub, child, e)]
            if not envs:
                return
        yield from envs

    def report(self) -> dict:
        return {
            "depth": self.depth,
            "rounds_done": self.rounds_done,
            "nodes": len(self.nodes),
            "classes": len(self.classes()),
            "relations": {k: self.counts[k] for k in sorted(self.counts)},
        }


def build_presentation(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    depth: int = DEFAULT_DEPTH,
    *,
    terms: Sequence[Term] = (),
    saturate: bool = True,
    budget: Budget = DEFAULT_BUDGET,
) -> CoproductPresentation:
    """Seed table and amalgamation facts, insert ``terms``, and (eagerly) run ``depth`` rounds."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    p = CoproductPresentation(A, B, tuple(ids), depth, budget)
    p.seed()
    for t in terms:
        p.add_term(t)
    if saturate:
        while p.rounds_done < depth:
            p.saturate_round()
    return p


def prove_equal(p: CoproductPresentation, s: Term, t: Term) -> Outcome:
    """Insert ``s`` and ``t`` and run remaining rounds until they meet or depth runs out."""
    try:
        a = p.add_term(s)
        b = p.add_term(t)
        while not p.same(a, b) and p.rounds_done < p.depth:
            p.saturate_round()
    except BudgetExceeded as exc:
        try:
            if p.same(p.add_term(s), p.add_term(t)):
                return Outcome(Verdict.PROVEN, "closed before budget ran out")
        except BudgetExceeded:
            pass
        return Outcome(Verdict.UNKNOWN, str(exc))
    if p.same(a, b):
        return Outcome(Verdict.PROVEN)
    return Outcome(Verdict.UNKNOWN, f"not joined after {p.rounds_done} instantiation round(s)")


def prove_terms(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    s: Term,
    t: Term,
    depth: int = DEFAULT_DEPTH,
    budget: Budget = DEFAULT_BUDGET,
) -> Outcome:
    """Fresh lazily-saturated presentation per query, so answers never depend on query order."""
    try:
        p = build_presentation(A, B, ids, depth, terms=(s, t), saturate=False, budget=budget)
    except BudgetExceeded as exc:
        return Outcome(Verdict.UNKNOWN, str(exc))
    return prove_equal(p, s, t)


def derivation(p: CoproductPresentation, s: Term, t: Term) -> list[Merge]:
    """The audit-log merges that touched the classes of ``s`` or ``t`` (coarse replay aid)."""
    target = {p.find(p.add_term(s)), p.find(p.add_term(t))}
    return [m for m in p.audit if p.find(m.a) in target]


# ---------------------------------------------------------------------------
# refutation

def _eval_split(term: Term, C: FiniteAlgebra, f: Sequence[int], g: Sequence[int]) -> int:
    return evaluate(term, C, gen=lambda x: f[x.element] if x.side == LEFT else g[x.element])


def refute_terms(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    s: Term,
    t: Term,
    max_c: int,
    *,
    codomains: Sequence[FiniteAlgebra] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Outcome:
    """Search for ``C, f, g`` with ``f|B = g|B`` sending ``s`` and ``t`` apart."""
    keys = sorted(B.members)
    try:
        for C in codomain_stream(A.sig, ids, max_c, codomains, budget):
            groups: dict[tuple, list[tuple[int, ...]]] = defaultdict(list)
            for f in enumerate_homomorphisms(A, C):
                groups[tuple(f[b] for b in keys)].append(f)
            for homs in groups.values():
                for f in homs:
                    for g in homs:
                        if _eval_split(s, C, f, g) != _eval_split(t, C, f, g):
                            return Outcome(Verdict.DISPROVEN, "separated", f=f, g=g, codomain=C)
    except BudgetExceeded as exc:
        return Outcome(Verdict.UNKNOWN, str(exc))
    return Outcome(Verdict.UNKNOWN, f"no separating pair among codomains of size <= {max_c}")


def refute_equal(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    a: int,
    a2: int,
    max_c: int,
    *,
    codomains: Sequence[FiniteAlgebra] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Outcome:
    """Try to show ``L:a != R:a2`` in the coproduct."""
    return refute_terms(
        A, B, ids, Gen(LEFT, a), Gen(RIGHT, a2), max_c, codomains=codomains, budget=budget
    )


def decide(
    A: FiniteAlgebra,
    B: Subalgebra,
    ids: Sequence[Identity],
    s: Term,
    t: Term,
    *,
    depth: int = DEFAULT_DEPTH,
    max_c: int = 2,
    codomains: Sequence[FiniteAlgebra] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Outcome:
    """Prove, else refute, else Unknown."""
    proof = prove_terms(A, B, ids, s, t, depth, budget)
    if proof.proven:
        return proof
    refutation = refute_terms(A, B, ids, s, t, max_c, codomains=codomains, budget=budget)
    if refutation.disproven:
        return refutation
    return Outcome(Verdict.UNKNOWN, f"{proof.reason}; {refutation.reason}")


def describe(t: Term) -> str:
    return format_term(t)
