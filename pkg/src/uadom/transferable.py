"""Split evaluation of a word in the amalgamated coproduct and transferable sets.

``W_{S1,S2}(x)`` is the word ``W`` with the variables of ``S1`` sent into the
left copy of ``A`` and those of ``S2`` into the right copy.  A set ``T`` of
variables is transferable when moving ``T`` from left to right never changes
that value, whatever the split of the remaining variables; the value of
``W`` lies in the dominion of B exactly when the whole variable set is
transferable.

Equality in the coproduct is delegated to a backend:

* :class:`CoproductBackend` works for any finite algebra and is three-valued
  (congruence closure to prove, homomorphism search to refute);
* :class:`ModelBackend` is exact for the integer model of ``uadom.model``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from uadom.algebra import FiniteAlgebra, Identity, Subalgebra
from uadom.coproduct import DEFAULT_DEPTH, Outcome, Verdict, decide
from uadom.errors import DEFAULT_BUDGET, Budget, BudgetExceeded
from uadom.model import EMPTY, ModelInstance, Pair, format_pair, induced_value, model_pair_equivalent, _mul
from uadom.terms import LEFT, RIGHT, App, Gen, Term, fold, format_term, tag, variables


class CoproductBackend:
    def __init__(
        self,
        A: FiniteAlgebra,
        B: Subalgebra,
        ids: Sequence[Identity],
        *,
        depth: int = DEFAULT_DEPTH,
        max_c: int = 2,
        codomains: Sequence[FiniteAlgebra] = (),
        budget: Budget = DEFAULT_BUDGET,
    ):
        self.A, self.B, self.ids = A, B, tuple(ids)
        self.depth, self.max_c, self.codomains, self.budget = depth, max_c, tuple(codomains), budget

    def compare(self, s: Term, t: Term) -> Outcome:
        if s == t:
            return Outcome(Verdict.PROVEN, "syntactically equal")
        return decide(
            self.A, self.B, self.ids, s, t,
            depth=self.depth, max_c=self.max_c, codomains=self.codomains, budget=self.budget,
        )


class ModelBackend:
    """Exact equality in the integer model; ``W`` must be built from ``mul`` alone."""

    def __init__(self, inst: ModelInstance, op: str = "mul"):
        self.inst = inst
        self.op = op

    def value(self, t: Term) -> Pair:
        def leaf(g: Term) -> Pair:
            if not isinstance(g, Gen):
                raise ValueError(f"untagged leaf {g} in a split value")
            return (g.element, EMPTY) if g.side == LEFT else (EMPTY, g.element)

        def node(a: App, ch: list) -> Pair:
            if a.op != self.op or len(ch) != 2:
                raise ValueError(f"model words use only binary {self.op!r}")
            return (_mul(ch[0][0], ch[1][0]), _mul(ch[0][1], ch[1][1]))

        return fold(t, leaf, node)

    def compare(self, s: Term, t: Term) -> Outcome:
        p, q = self.value(s), self.value(t)
        if model_pair_equivalent(self.inst, p, q):
            return Outcome(Verdict.PROVEN, "connected by divisor moves")
        hp, hq = induced_value(self.inst, p), induced_value(self.inst, q)
        if hp != hq:
            return Outcome(Verdict.DISPROVEN, f"mod-M and zero maps induce {hp} != {hq}")
        return Outcome(
            Verdict.DISPROVEN,
            f"pairs {format_pair(p)} and {format_pair(q)} are not connected by divisor moves",
        )


@dataclass
class SplitContext:
    W: Term
    S: tuple[str, ...]
    x: Mapping[str, Any]
    backend: Any
    budget: Budget = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        self.S = tuple(self.S)
        if len(set(self.S)) != len(self.S):
            raise ValueError("variable list has duplicates")
        extra = set(variables(self.W)) - set(self.S)
        if extra:
            raise ValueError(f"word uses variables {sorted(extra)} outside S")
        missing = [s for s in self.S if s not in self.x]
        if missing:
            raise ValueError(f"assignment misses {missing}")
        if len(self.S) > self.budget.partition_vars:
            raise BudgetExceeded("partition variable", self.budget.partition_vars, len(self.S))


def split_value(ctx: SplitContext, left: Sequence[str], right: Sequence[str]) -> Term:
    """``W`` with each variable replaced by ``L:x_s`` (left) or ``R:x_s`` (right)."""
    left, right = set(left), set(right)
    if left & right or left | right != set(ctx.S):
        raise ValueError("left and right must partition S")
    sides = {s: LEFT if s in left else RIGHT for s in ctx.S}
    return tag(ctx.W, ctx.x, sides)


@dataclass(frozen=True)
class Partition3:
    S1: tuple[str, ...]
    T: tuple[str, ...]
    S2: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"S1": list(self.S1), "T": list(self.T), "S2": list(self.S2)}


class Status(enum.Enum):
    TRANSFERABLE = "transferable"
    NOT_TRANSFERABLE = "not-transferable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TransferResult:
    status: Status
    witness: Partition3 | None = None
    undecided: tuple[Partition3, ...] = ()
    reasons: tuple[str, ...] = ()
    checked: int = 0

    def to_dict(self) -> dict:
        out: dict = {"status": self.status.value, "partitions_checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.undecided:
            out["undecided"] = [p.to_dict() for p in self.undecided]
        if self.reasons:
            out["reasons"] = list(self.reasons)
        return out


def partitions(ctx: SplitContext, T: Sequence[str]):
    """Partitions ``S1 | T | S2`` of S, counting ``S1`` up as a bit pattern over ``S \\ T``."""
    T = tuple(s for s in ctx.S if s in set(T))
    rest = [s for s in ctx.S if s not in set(T)]
    for bits in range(1 << len(rest)):
        s1 = tuple(rest[k] for k in range(len(rest)) if bits >> k & 1)
        s2 = tuple(rest[k] for k in range(len(rest)) if not bits >> k & 1)
        yield Partition3(s1, T, s2)


def is_transferable(ctx: SplitContext, T: Sequence[str]) -> TransferResult:
    """Check ``W_{S1 u T, S2}(x) = W_{S1, T u S2}(x)`` for every partition; worst verdict wins."""
    unknown_set = set(T) - set(ctx.S)
    if unknown_set:
        raise ValueError(f"T contains {sorted(unknown_set)} outside S")
    undecided, reasons = [], []
    checked = 0
    for part in partitions(ctx, T):
        checked += 1
        left = split_value(ctx, part.S1 + part.T, part.S2)
        right = split_value(ctx, part.S1, part.T + part.S2)
        if left == right:
            continue
        outcome = ctx.backend.compare(left, right)
        if outcome.verdict is Verdict.DISPROVEN:
            return TransferResult(Status.NOT_TRANSFERABLE, part, tuple(undecided), (outcome.reason,), checked)
        if outcome.verdict is Verdict.UNKNOWN:
            undecided.append(part)
            reasons.append(outcome.reason)
    if undecided:
        return TransferResult(Status.UNKNOWN, None, tuple(undecided), tuple(reasons), checked)
    return TransferResult(Status.TRANSFERABLE, checked=checked)


def in_dominion(ctx: SplitContext) -> Verdict:
    """Dominion membership of ``W(x)``: proven iff the whole variable set is transferable."""
    result = is_transferable(ctx, ctx.S)
    if result.status is Status.TRANSFERABLE:
        full_left = split_value(ctx, ctx.S, ())
        full_right = split_value(ctx, (), ctx.S)
        if full_left != full_right and ctx.backend.compare(full_left, full_right).verdict is not Verdict.PROVEN:
            raise AssertionError("backend disagrees on the unsplit values")
        return Verdict.PROVEN
    if result.status is Status.NOT_TRANSFERABLE:
        return Verdict.DISPROVEN
    return Verdict.UNKNOWN


def transferable_collection(ctx: SplitContext) -> dict[frozenset, Status]:
    """Status of every subset of S (subsets listed by bit pattern over S)."""
    out = {}
    for bits in range(1 << len(ctx.S)):
        T = [ctx.S[k] for k in range(len(ctx.S)) if bits >> k & 1]
        out[frozenset(T)] = is_transferable(ctx, T).status
    return out


def product_word(names: Sequence[str], op: str = "mul") -> Term:
    """Left-nested product of the named variables."""
    from uadom.terms import Var

    if not names:
        raise ValueError("empty product")
    t: Term = Var(names[0])
    for n in names[1:]:
        t = App(op, (t, Var(n)))
    return t


def model_context(inst: ModelInstance, x: Mapping[str, Any] | None = None) -> SplitContext:
    """The product word ``s1 ... sn`` over the instance, with ``s_i = x_i`` by default."""
    names = tuple(f"s{i}" for i in range(1, inst.n + 1))
    if x is None:
        x = {f"s{i}": inst.x(i) for i in range(1, inst.n + 1)}
    return SplitContext(product_word(names), names, x, ModelBackend(inst))


def describe(t: Term) -> str:
    return format_term(t)
