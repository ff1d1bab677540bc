"""Equational arrays, dominion-membership certificates and the B* closure.

An array of size ``m`` has outer words ``W_1..W_m`` in the letters
``a1..am`` and inner words ``w_ij`` in the letters ``x1..x{n_j}``.  Row
``i`` is the composite ``W_i(w_i1(block 1), ..., w_im(block m))`` where the
letters of block ``j`` are renamed ``x{j}_{k}``.  The array is valid when
all rows are equal as identities.

A certificate records the chain that moves a pair ``f, g`` of
homomorphisms agreeing on B across the blocks one at a time: a swap at
block ``i`` is justified by ``w_ii(x_i)`` lying in B, a rewrite from row
``i`` to row ``i + 1`` by the array identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

from uadom.algebra import (
    FiniteAlgebra,
    Identity,
    Subalgebra,
    check_identity,
    codomain_stream,
    enumerate_homomorphisms,
    generate_subalgebra,
)
from uadom.errors import DEFAULT_BUDGET, Budget, BudgetExceeded, HypothesisFailure
from uadom.terms import Term, Var, check_term, evaluate, format_term, rename, substitute, variables
from uadom.zigzag import ZigzagInstance, find_zigzag_instance, zigzag_census  # noqa: F401


def block_var(j: int, k: int) -> str:
    return f"x{j}_{k}"


def outer_var(i: int) -> str:
    return f"a{i}"


def inner_var(k: int) -> str:
    return f"x{k}"


@dataclass(frozen=True)
class EquationalArray:
    m: int
    nsig: tuple[int, ...]
    outer: tuple[Term, ...]
    inner: tuple[tuple[Term, ...], ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("array size must be at least 1")
        if len(self.nsig) != self.m or len(self.outer) != self.m or len(self.inner) != self.m:
            raise ValueError("array dimensions disagree with m")
        allowed_outer = {outer_var(i) for i in range(1, self.m + 1)}
        for i, W in enumerate(self.outer, 1):
            extra = set(variables(W)) - allowed_outer
            if extra:
                raise ValueError(f"W{i} uses letters {sorted(extra)} outside a1..a{self.m}")
        for i, row in enumerate(self.inner, 1):
            if len(row) != self.m:
                raise ValueError(f"row {i} of inner words has {len(row)} entries")
            for j, w in enumerate(row, 1):
                allowed = {inner_var(k) for k in range(1, self.nsig[j - 1] + 1)}
                extra = set(variables(w)) - allowed
                if extra:
                    raise ValueError(f"w{i}{j} uses letters {sorted(extra)} outside x1..x{self.nsig[j - 1]}")

    def block_vars(self, j: int) -> list[str]:
        return [block_var(j, k) for k in range(1, self.nsig[j - 1] + 1)]

    def all_vars(self) -> list[str]:
        return [v for j in range(1, self.m + 1) for v in self.block_vars(j)]

    def inner_term(self, i: int, j: int) -> Term:
        """``w_ij`` written over the letters of block ``j``."""
        return rename(self.inner[i - 1][j - 1], {inner_var(k): block_var(j, k) for k in range(1, self.nsig[j - 1] + 1)})

    def row(self, i: int) -> Term:
        W = self.outer[i - 1]
        return substitute(W, {outer_var(j): self.inner_term(i, j) for j in range(1, self.m + 1)})

    def identities(self) -> list[Identity]:
        return [Identity(self.row(i), self.row(i + 1)) for i in range(1, self.m)]

    def check_signature(self, sig) -> None:
        for t in (*self.outer, *(w for row in self.inner for w in row)):
            check_term(t, sig)


def identity_array() -> EquationalArray:
    """``W_1(a) = a``, ``w_11(x) = x``: certifies exactly the elements of B."""
    return EquationalArray(1, (1,), (Var("a1"),), ((Var("x1"),),))


@dataclass(frozen=True)
class SharedArray:
    """Two blocks plus shared letters ``y``; one identity ``row 1 = row 2``.

    ``w11, w21`` are words in ``block_vars[0] + shared_vars``; ``w12, w22`` in
    ``block_vars[1] + shared_vars``.  ``W1, W2`` are words in ``a1, a2``.
    """

    W1: Term
    W2: Term
    w11: Term
    w12: Term
    w21: Term
    w22: Term
    block_vars: tuple[tuple[str, ...], tuple[str, ...]]
    shared_vars: tuple[str, ...]

    def __post_init__(self) -> None:
        names = [*self.block_vars[0], *self.block_vars[1], *self.shared_vars]
        if len(set(names)) != len(names):
            raise ValueError("block and shared letters must be distinct")
        for label, w, j in (("w11", self.w11, 0), ("w21", self.w21, 0), ("w12", self.w12, 1), ("w22", self.w22, 1)):
            extra = set(variables(w)) - set(self.block_vars[j]) - set(self.shared_vars)
            if extra:
                raise ValueError(f"{label} uses letters {sorted(extra)} outside its block")
        for label, W in (("W1", self.W1), ("W2", self.W2)):
            extra = set(variables(W)) - {"a1", "a2"}
            if extra:
                raise ValueError(f"{label} uses letters {sorted(extra)} outside a1, a2")

    def row(self, i: int) -> Term:
        W, first, second = (self.W1, self.w11, self.w12) if i == 1 else (self.W2, self.w21, self.w22)
        return substitute(W, {"a1": first, "a2": second})

    def all_vars(self) -> list[str]:
        return [*self.block_vars[0], *self.block_vars[1], *self.shared_vars]

    def identities(self) -> list[Identity]:
        return [Identity(self.row(1), self.row(2))]

    def without_shared(self) -> EquationalArray:
        """The plain size-2 array, valid only when there are no shared letters."""
        if self.shared_vars:
            raise ValueError("array has shared letters")
        maps = [
            {v: inner_var(k) for k, v in enumerate(self.block_vars[j], 1)} for j in (0, 1)
        ]
        return EquationalArray(
            2,
            (len(self.block_vars[0]), len(self.block_vars[1])),
            (self.W1, self.W2),
            (
                (rename(self.w11, maps[0]), rename(self.w12, maps[1])),
                (rename(self.w21, maps[0]), rename(self.w22, maps[1])),
            ),
        )


def zigzag_array() -> SharedArray:
    """``(xy)z = x(yz)`` with blocks ``x``, ``z`` and shared ``y``."""
    from uadom.terms import app

    x, y, z = Var("x"), Var("y"), Var("z")
    a1, a2 = Var("a1"), Var("a2")
    return SharedArray(
        W1=app("mul", a1, a2),
        W2=app("mul", a1, a2),
        w11=app("mul", x, y),
        w12=z,
        w21=x,
        w22=app("mul", y, z),
        block_vars=(("x",), ("z",)),
        shared_vars=("y",),
    )


def commutator_array(n: int) -> EquationalArray:
    """``[x, y^n] = [x^n, y]`` as a size-2 array of signature ``(1, 1)``."""
    from uadom.library import commutator, power

    a1, a2, x1 = Var("a1"), Var("a2"), Var("x1")
    W = commutator(a1, a2)
    return EquationalArray(2, (1, 1), (W, W), ((power(x1, n), x1), (x1, power(x1, n))))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Holds:
    ok: bool = True

    def to_dict(self) -> dict:
        return {"verdict": "holds"}


@dataclass(frozen=True)
class Counterexample:
    algebra_index: int
    row: int
    assignment: dict[str, int]
    ok: bool = False

    def to_dict(self) -> dict:
        return {
            "verdict": "counterexample",
            "algebra_index": self.algebra_index,
            "row": self.row,
            "assignment": dict(sorted(self.assignment.items())),
        }


def validate_array(
    arr: Union[EquationalArray, SharedArray],
    algebras: Sequence[FiniteAlgebra],
    budget: Budget = DEFAULT_BUDGET,
) -> Holds | Counterexample:
    """Exhaustively check each adjacent row pair in every algebra."""
    order = arr.all_vars()
    for idx, alg in enumerate(algebras):
        for row, ident in enumerate(arr.identities(), 1):
            cex = check_identity(alg, ident, budget, order)
            if cex is not None:
                return Counterexample(idx, row, cex)
    return Holds()


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class Step:
    kind: str  # "swap", "shared-swap" or "rewrite"
    block: int  # swap: block index; rewrite: source row
    witness: tuple[int, ...] = ()  # values asserted to lie in B (swaps only)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "block": self.block}
        if self.kind != "rewrite":
            out["witness"] = list(self.witness)
        return out


@dataclass(frozen=True)
class Certificate:
    array: Union[EquationalArray, SharedArray]
    A: FiniteAlgebra
    B: Subalgebra
    assignment: Mapping[str, int]
    steps: tuple[Step, ...]
    value: int
    axiom: bool = False
    validated_in: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": "shared" if isinstance(self.array, SharedArray) else "array",
            "value": self.value,
            "assignment": dict(sorted(self.assignment.items())),
            "steps": [s.to_dict() for s in self.steps],
            "assumptions": {
                "array_validity": "axiom" if self.axiom else f"checked in {self.validated_in} algebra(s)",
            },
        }


def _diag_value(arr: EquationalArray, A: FiniteAlgebra, x: Mapping[str, int], i: int) -> int:
    return evaluate(arr.inner_term(i, i), A, x)


def _prepare(arr, A: FiniteAlgebra, axiom: bool, algebras, budget: Budget) -> int:
    if axiom:
        return 0
    algebras = list(algebras) if algebras is not None else [A]
    verdict = validate_array(arr, algebras, budget)
    if not verdict.ok:
        raise ValueError(
            f"array fails in validation algebra {verdict.algebra_index} at row {verdict.row}: {verdict.assignment}"
        )
    return len(algebras)


def certify(
    arr: EquationalArray,
    A: FiniteAlgebra,
    B: Subalgebra,
    x: Mapping[str, int],
    *,
    axiom: bool = False,
    algebras: Sequence[FiniteAlgebra] | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> Certificate:
    """Certificate that ``W_1(w_11(x_1), ..., w_1m(x_m))`` lies in the dominion of B.

    The array is validated in ``algebras`` (default ``[A]``) unless ``axiom``
    is set.  Raises :class:`HypothesisFailure` naming the first block whose
    diagonal word leaves B.
    """
    missing = [v for v in arr.all_vars() if v not in x]
    if missing:
        raise ValueError(f"assignment misses {missing}")
    checked = _prepare(arr, A, axiom, algebras, budget)
    steps = []
    for i in range(1, arr.m + 1):
        d = _diag_value(arr, A, x, i)
        if d not in B:
            raise HypothesisFailure(i, d)
        steps.append(Step("swap", i, (d,)))
        if i < arr.m:
            steps.append(Step("rewrite", i))
    value = evaluate(arr.row(1), A, x)
    return Certificate(arr, A, B, dict(x), tuple(steps), value, axiom, checked)


def certify_shared(
    sh: SharedArray,
    A: FiniteAlgebra,
    B: Subalgebra,
    x1: Sequence[int],
    x2: Sequence[int],
    y: Sequence[int],
    *,
    axiom: bool = False,
    algebras: Sequence[FiniteAlgebra] | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> Certificate:
    """Certificate for ``W_1(w_11(x1, y), w_12(x2, y))`` when ``y`` and both diagonal words lie in B."""
    if len(x1) != len(sh.block_vars[0]) or len(x2) != len(sh.block_vars[1]) or len(y) != len(sh.shared_vars):
        raise ValueError("block lengths do not match the array")
    outside = [v for v in y if v not in B]
    if outside:
        raise ValueError(f"shared values must lie in B; {outside} do not")
    checked = _prepare(sh, A, axiom, algebras, budget)
    x = {**dict(zip(sh.block_vars[0], x1)), **dict(zip(sh.block_vars[1], x2)), **dict(zip(sh.shared_vars, y))}
    d1 = evaluate(sh.w11, A, x)
    if d1 not in B:
        raise HypothesisFailure(1, d1)
    d2 = evaluate(sh.w22, A, x)
    if d2 not in B:
        raise HypothesisFailure(2, d2)
    steps = (
        Step("shared-swap", 0, tuple(y)),
        Step("swap", 1, (d1,)),
        Step("rewrite", 1),
        Step("swap", 2, (d2,)),
    )
    return Certificate(sh, A, B, x, steps, evaluate(sh.row(1), A, x), axiom, checked)


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class Verified:
    codomains_checked: int
    pairs_checked: int

    def to_dict(self) -> dict:
        return {"verdict": "verified", "codomains_checked": self.codomains_checked, "pairs_checked": self.pairs_checked}


@dataclass(frozen=True)
class Broken:
    step: int
    reason: str

    def to_dict(self) -> dict:
        return {"verdict": "broken", "step": self.step, "reason": self.reason}


@dataclass(frozen=True)
class Separated:
    codomain: FiniteAlgebra
    f: tuple[int, ...]
    g: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"verdict": "separated", "codomain": self.codomain.to_dict(), "f": list(self.f), "g": list(self.g)}


def _replay(cert: Certificate) -> Broken | None:
    arr, A, B, x = cert.array, cert.A, cert.B, cert.assignment
    shared = isinstance(arr, SharedArray)
    expected_blocks = 2 if shared else arr.m
    swaps = [s for s in cert.steps if s.kind == "swap"]
    if [s.block for s in swaps] != list(range(1, expected_blocks + 1)):
        return Broken(0, "swap steps do not cover every block once, in order")
    if evaluate(arr.row(1), A, x) != cert.value:
        return Broken(0, "certified value is not the first row at the assignment")
    for idx, step in enumerate(cert.steps, 1):
        if step.kind == "shared-swap":
            if not shared:
                return Broken(idx, "shared swap in a plain array")
            actual = tuple(x[v] for v in arr.shared_vars)
            if actual != step.witness or any(v not in B for v in actual):
                return Broken(idx, "shared values not in B")
        elif step.kind == "swap":
            if shared:
                w = arr.w11 if step.block == 1 else arr.w22
                actual = evaluate(w, A, x)
            else:
                actual = _diag_value(arr, A, x, step.block)
            if (actual,) != step.witness or actual not in B:
                return Broken(idx, f"diagonal word of block {step.block} is {actual}, not in B")
        elif step.kind == "rewrite":
            i = step.block
            if evaluate(arr.row(i), A, x) != evaluate(arr.row(i + 1), A, x):
                return Broken(idx, f"rows {i} and {i + 1} differ at the assignment")
        else:
            return Broken(idx, f"unknown step kind {step.kind!r}")
    return None


def verify_certificate(
    cert: Certificate,
    codomains: Sequence[FiniteAlgebra] = (),
    max_c: int = 0,
    ids: Sequence[Identity] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Verified | Broken | Separated:
    """Replay the chain in A, then look for homomorphism pairs that separate the value.

    A ``Separated`` result would mean the certificate machinery is unsound.
    """
    broken = _replay(cert)
    if broken is not None:
        return broken
    keys = sorted(cert.B.members)
    tested = pairs = 0
    for C in codomain_stream(cert.A.sig, ids, max_c, codomains, budget):
        tested += 1
        groups: dict[tuple, list] = {}
        for f in enumerate_homomorphisms(cert.A, C):
            groups.setdefault(tuple(f[b] for b in keys), []).append(f)
        for homs in groups.values():
            first = homs[0]
            for g in homs:
                pairs += 1
                if first[cert.value] != g[cert.value]:
                    return Separated(C, first, g)
    return Verified(tested, pairs)


# ---------------------------------------------------------------------------
# B*

@dataclass(frozen=True)
class BStar:
    members: frozenset[int]
    certified: frozenset[int]
    closure: Subalgebra = field(compare=False)

    def __contains__(self, a: object) -> bool:
        return a in self.members


def _certified_plain(arr: EquationalArray, A: FiniteAlgebra, B: Subalgebra, budget: Budget) -> set[int]:
    per_block: list[set[int]] = []
    for j in range(1, arr.m + 1):
        names = arr.block_vars(j)
        if A.size ** len(names) > budget.assignments:
            raise BudgetExceeded("assignment", budget.assignments, A.size ** len(names))
        values = set()
        diag, top = arr.inner_term(j, j), arr.inner_term(1, j)
        for combo in itertools.product(A.elements, repeat=len(names)):
            env = dict(zip(names, combo))
            if evaluate(diag, A, env) in B:
                values.add(evaluate(top, A, env))
        per_block.append(values)
    total = 1
    for vals in per_block:
        total *= len(vals)
    if total > budget.assignments:
        raise BudgetExceeded("assignment", budget.assignments, total)
    W = arr.outer[0]
    out = set()
    for combo in itertools.product(*(sorted(v) for v in per_block)):
        out.add(evaluate(W, A, {outer_var(j): v for j, v in enumerate(combo, 1)}))
    return out


def _certified_shared(sh: SharedArray, A: FiniteAlgebra, B: Subalgebra, budget: Budget) -> set[int]:
    n = len(sh.all_vars())
    if A.size**n > budget.assignments:
        raise BudgetExceeded("assignment", budget.assignments, A.size**n)
    out = set()
    ys = list(itertools.product(sorted(B.members), repeat=len(sh.shared_vars)))
    for y in ys:
        env_y = dict(zip(sh.shared_vars, y))
        firsts = set()
        for x1 in itertools.product(A.elements, repeat=len(sh.block_vars[0])):
            env = {**env_y, **dict(zip(sh.block_vars[0], x1))}
            if evaluate(sh.w11, A, env) in B:
                firsts.add(evaluate(sh.w11, A, env))
        seconds = set()
        for x2 in itertools.product(A.elements, repeat=len(sh.block_vars[1])):
            env = {**env_y, **dict(zip(sh.block_vars[1], x2))}
            if evaluate(sh.w22, A, env) in B:
                seconds.add(evaluate(sh.w12, A, env))
        for u in firsts:
            for v in seconds:
                out.add(evaluate(sh.W1, A, {"a1": u, "a2": v}))
    return out


def b_star(
    A: FiniteAlgebra,
    B: Subalgebra,
    arrays: Iterable[Union[EquationalArray, SharedArray]],
    budget: Budget = DEFAULT_BUDGET,
) -> BStar:
    """Elements certified by ``arrays`` over all admissible assignments, closed into a subalgebra.

    Arrays are assumed valid in the variety; each is checked in ``A`` itself
    and rejected if it fails there.
    """
    certified: set[int] = set()
    for arr in arrays:
        verdict = validate_array(arr, [A], budget)
        if not verdict.ok:
            raise ValueError(f"array does not hold in A: {verdict.to_dict()}")
        if isinstance(arr, SharedArray):
            certified |= _certified_shared(arr, A, B, budget)
        else:
            certified |= _certified_plain(arr, A, B, budget)
    closure = generate_subalgebra(A, certified | set(B.members))
    return BStar(closure.members, frozenset(certified), closure)


# ---------------------------------------------------------------------------
# composition along an operation

def compose_arrays(tau: str, arity: int, arrays: Sequence[EquationalArray]) -> EquationalArray:
    """Combine ``arity`` arrays through a ``tau``-application into one array.

    Blocks are ``(l, j)`` for array ``l`` and its block ``j``, listed array by
    array.  Row ``(l, j)`` has every earlier array at its last row, array
    ``l`` at row ``j`` and every later array at its first row.  Consecutive
    rows therefore differ by one step of a single array, or not at all at
    the boundary between two arrays.  The first row certifies
    ``tau(value_1, ..., value_k)``.
    """
    from uadom.terms import App

    if len(arrays) != arity or arity < 1:
        raise ValueError("need one array per argument of tau")
    blocks = [(l, j) for l, arr in enumerate(arrays) for j in range(1, arr.m + 1)]
    offset = [0]
    for arr in arrays:
        offset.append(offset[-1] + arr.m)
    size = offset[-1]
    nsig = tuple(arrays[l].nsig[j - 1] for l, j in blocks)

    def row_of(l2: int, l: int, j: int) -> int:
        if l2 < l:
            return arrays[l2].m
        if l2 == l:
            return j
        return 1

    outer, inner = [], []
    for l, j in blocks:
        parts = []
        row_inner = []
        for l2, arr in enumerate(arrays):
            r = row_of(l2, l, j)
            W = rename(arr.outer[r - 1], {outer_var(i): outer_var(offset[l2] + i) for i in range(1, arr.m + 1)})
            parts.append(W)
            row_inner.extend(arr.inner[r - 1])
        outer.append(App(tau, tuple(parts)))
        inner.append(tuple(row_inner))
    return EquationalArray(size, nsig, tuple(outer), tuple(inner))


def describe_array(arr: EquationalArray) -> dict:
    return {
        "m": arr.m,
        "sig": list(arr.nsig),
        "outer": [format_term(W) for W in arr.outer],
        "inner": [[format_term(w) for w in row] for row in arr.inner],
    }


def tamper(cert: Certificate, **changes) -> Certificate:
    """Copy of ``cert`` with fields replaced (for negative tests and demos)."""
    return replace(cert, **changes)
