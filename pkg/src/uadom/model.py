"""The multiplicative semigroup of positive integers, amalgamated over the multiples of M.

Integers are exponent vectors over the first ``n`` primes.  An element of
the amalgamated coproduct (commutative semigroups) is a pair ``(u, v)`` of
elements of ``A`` with a formal empty product allowed in at most one
coordinate: ``(u, EMPTY)`` is the left copy of ``u``, ``(EMPTY, v)`` the
right copy of ``v``, and ``(u, v)`` their product.  ``EMPTY`` is distinct
from the integer 1, which is an ordinary element of ``A``.

Two pairs are equivalent iff they are connected by moves
``(s*b, t) <-> (s, t*b)`` with ``b`` in ``B`` and ``s, t`` possibly empty.
Moves preserve the total product, so the search space is the finite set of
ordered factorizations of that product.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import sympy

EMPTY = None


@dataclass(frozen=True, order=True)
class FactoredInt:
    """``prod_i p_i ** exps[i]`` where ``p_i`` is the i-th prime (``p_0 = 2``)."""

    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.exps):
            raise ValueError("exponents must be non-negative")

    @classmethod
    def one(cls, n: int) -> "FactoredInt":
        return cls((0,) * n)

    @classmethod
    def prime(cls, n: int, i: int) -> "FactoredInt":
        """The i-th prime (0-based) in an ``n``-prime context."""
        return cls(tuple(1 if j == i else 0 for j in range(n)))

    @classmethod
    def of(cls, value: int, n: int) -> "FactoredInt":
        if value < 1:
            raise ValueError("only positive integers are represented")
        exps = []
        for i in range(n):
            p = sympy.prime(i + 1)
            e = 0
            while value % p == 0:
                value //= p
                e += 1
            exps.append(e)
        if value != 1:
            raise ValueError(f"value has a prime factor beyond the first {n} primes")
        return cls(tuple(exps))

    def __mul__(self, other: "FactoredInt") -> "FactoredInt":
        return FactoredInt(tuple(a + b for a, b in zip(self.exps, other.exps, strict=True)))

    def divides(self, other: "FactoredInt") -> bool:
        return all(a <= b for a, b in zip(self.exps, other.exps, strict=True))

    def __truediv__(self, other: "FactoredInt") -> "FactoredInt":
        if not other.divides(self):
            raise ValueError(f"{other} does not divide {self}")
        return FactoredInt(tuple(a - b for a, b in zip(self.exps, other.exps)))

    def divisors(self) -> Iterator["FactoredInt"]:
        for e in itertools.product(*(range(k + 1) for k in self.exps)):
            yield FactoredInt(e)

    @property
    def is_one(self) -> bool:
        return not any(self.exps)

    @property
    def value(self) -> int:
        out = 1
        for i, e in enumerate(self.exps):
            if e:
                out *= sympy.prime(i + 1) ** e
        return out

    def __str__(self) -> str:
        return str(self.value)


Coordinate = Optional[FactoredInt]
Pair = tuple[Coordinate, Coordinate]


def product(factors: Iterable[FactoredInt], n: int) -> Coordinate:
    """Product of ``factors``; ``EMPTY`` when there are none."""
    out: Coordinate = EMPTY
    for f in factors:
        out = f if out is None else out * f
    return out


def _mul(u: Coordinate, v: Coordinate) -> Coordinate:
    if u is None:
        return v
    if v is None:
        return u
    return u * v


@dataclass(frozen=True)
class ModelInstance:
    """``n`` primes; ``B`` = multiples of ``M``, the product of the first ``m`` primes."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 0 or not 0 <= self.m <= self.n:
            raise ValueError("need 0 <= m <= n")
        if self.m == 1:
            raise ValueError("m must be 0 or at least 2")

    @property
    def M(self) -> FactoredInt:
        return FactoredInt(tuple(1 if i < self.m else 0 for i in range(self.n)))

    def x(self, i: int) -> FactoredInt:
        """The variable value ``x_i`` for 1-based ``i``."""
        if not 1 <= i <= self.n:
            raise ValueError(f"variable index {i} outside 1..{self.n}")
        return FactoredInt.prime(self.n, i - 1)

    def in_B(self, u: FactoredInt) -> bool:
        return model_in_B(self, u)

    def reduce_mod_M(self, u: FactoredInt) -> int:
        """Residue of ``u`` modulo ``M`` (the canonical map to the integers mod M)."""
        if self.m == 0:
            return 0
        return u.value % self.M.value


def model_in_B(inst: ModelInstance, u: FactoredInt) -> bool:
    if len(u.exps) != inst.n:
        raise ValueError("exponent vector length does not match the instance")
    return all(u.exps[i] >= 1 for i in range(inst.m))


def _check_pair(inst: ModelInstance, p: Pair) -> None:
    if p[0] is None and p[1] is None:
        raise ValueError("a coproduct element needs at least one non-empty coordinate")
    for c in p:
        if c is not None and len(c.exps) != inst.n:
            raise ValueError("exponent vector length does not match the instance")


def _neighbours(inst: ModelInstance, p: Pair) -> Iterator[Pair]:
    u, v = p
    for src, dst, flip in ((u, v, False), (v, u, True)):
        if src is None:
            continue
        for b in src.divisors():
            if not model_in_B(inst, b):
                continue
            rests: list[Coordinate] = [src / b]
            if b == src:
                rests = [EMPTY, src / b]
            for rest in rests:
                moved = _mul(dst, b)
                yield (moved, rest) if flip else (rest, moved)


@functools.lru_cache(maxsize=4096)
def _component(inst: ModelInstance, start: Pair) -> frozenset:
    seen = {start}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for q in _neighbours(inst, p):
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return frozenset(seen)


def model_pair_equivalent(inst: ModelInstance, p: Pair, q: Pair) -> bool:
    """Exact decision of ``p ~ q`` by breadth-first search over divisor moves."""
    _check_pair(inst, p)
    _check_pair(inst, q)
    if p == q:
        return True
    one = FactoredInt.one(inst.n)
    total_p = _mul(_mul(p[0], p[1]), one)
    total_q = _mul(_mul(q[0], q[1]), one)
    if total_p != total_q:
        return False
    return q in _component(inst, p)


def pair_of_split(inst: ModelInstance, left: Iterable[int], right: Iterable[int]) -> Pair:
    """The coproduct value of ``x_1 ... x_n`` with ``left`` variables in the left copy."""
    return (
        product((inst.x(i) for i in sorted(left)), inst.n),
        product((inst.x(i) for i in sorted(right)), inst.n),
    )


def model_transferable(inst: ModelInstance, T: Iterable[int]) -> bool:
    """``T`` is transferable for the product word iff it is empty or its product lies in B."""
    T = sorted(set(T))
    if not T:
        return True
    return model_in_B(inst, product((inst.x(i) for i in T), inst.n))


def model_transferable_bfs(inst: ModelInstance, T: Iterable[int]) -> bool:
    """Same question answered by checking every partition of the other variables by search."""
    T = set(T)
    if inst.n == 0:
        return True  # the empty word has no split values to compare
    rest = [i for i in range(1, inst.n + 1) if i not in T]
    for bits in range(1 << len(rest)):
        s1 = {rest[k] for k in range(len(rest)) if bits >> k & 1}
        s2 = set(rest) - s1
        if not model_pair_equivalent(
            inst, pair_of_split(inst, s1 | T, s2), pair_of_split(inst, s1, T | s2)
        ):
            return False
    return True


def separate(inst: ModelInstance, u: FactoredInt) -> Optional[tuple[int, int]]:
    """Values of the mod-M map and the zero map at ``u``; ``None`` when they agree.

    Both maps send every multiple of ``M`` to 0, so they agree on ``B``.
    """
    if inst.m == 0:
        return None
    r = inst.reduce_mod_M(u)
    return None if r == 0 else (r, 0)


def induced_value(inst: ModelInstance, p: Pair) -> int:
    """Image of a pair under the map induced by (mod-M, zero): ``u mod M`` if the right side is empty."""
    u, v = p
    if v is not None:
        return 0
    return inst.reduce_mod_M(u)


def bounded_elements(n: int, bound: int) -> Iterator[FactoredInt]:
    for e in itertools.product(range(bound + 1), repeat=n):
        yield FactoredInt(e)


def format_pair(p: Pair) -> list:
    return [None if c is None else list(c.exps) for c in p]


def parse_coordinate(text: str, n: int) -> Coordinate:
    """``e`` (or empty) for the empty product, an integer, or exponents like ``1.0.2``."""
    text = text.strip()
    if text in ("", "e", "empty"):
        return EMPTY
    if "." in text or text.startswith("["):
        parts = text.strip("[]").replace(",", ".").split(".")
        exps = tuple(int(p) for p in parts)
        if len(exps) != n:
            raise ValueError(f"expected {n} exponents, got {len(exps)}")
        return FactoredInt(exps)
    return FactoredInt.of(int(text), n)


def parse_pair(text: str, n: int) -> Pair:
    if "," not in text:
        raise ValueError(f"pair must be 'u,v', got {text!r}")
    u, v = text.split(",", 1)
    return (parse_coordinate(u, n), parse_coordinate(v, n))


def ordered_factorizations(total: FactoredInt) -> Sequence[Pair]:
    """All pairs with product ``total`` (empty coordinates counted as 1)."""
    out: list[Pair] = []
    for d in total.divisors():
        out.append((d, total / d))
    out.append((EMPTY, total))
    out.append((total, EMPTY))
    return out
