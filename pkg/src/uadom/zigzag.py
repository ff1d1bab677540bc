"""Search for semigroups exhibiting the smallest zigzag.

A configuration is ``(A, B, x, y, z)`` with ``y, xy, yz`` in ``B`` and
``xyz`` outside ``B``; such an ``xyz`` lies in the dominion of ``B`` but
not in ``B``.  Any such ``B`` contains the subsemigroup generated by
``y, xy, yz``, and shrinking ``B`` keeps ``xyz`` outside, so the search only
ever considers ``B = <y, xy, yz>``.

The search fills a multiplication table cell by cell.  ``x`` and ``y`` are
pinned to 0 and 1 and ``z`` to 0 or 2 (``x != y`` and ``z != y`` are forced
because ``x, z`` must lie outside ``B``).  Cells are filled in order of
``max(a, b)``, so each new element's row and column are completed before the
next element is touched, and fresh values follow the least-number
heuristic.  Associativity is checked incrementally; the partial closure of
``{y, xy, yz}`` only grows as cells are filled, so it prunes as soon as it
swallows ``x``, ``z`` or ``xyz``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from uadom.algebra import FiniteAlgebra, Subalgebra, enumerate_models, generate_subalgebra, make_subalgebra
from uadom.errors import DEFAULT_BUDGET, Budget
from uadom.library import SEMIGROUP, SEMIGROUP_IDS


@dataclass(frozen=True)
class ZigzagInstance:
    A: FiniteAlgebra
    B: Subalgebra
    x: int
    y: int
    z: int

    @property
    def d(self) -> int:
        mul = lambda a, b: self.A.apply("mul", (a, b))  # noqa: E731
        return mul(mul(self.x, self.y), self.z)

    def to_dict(self) -> dict:
        return {
            "algebra": self.A.to_dict(),
            "B": sorted(self.B.members),
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "xyz": self.d,
        }


def is_zigzag(A: FiniteAlgebra, B: Subalgebra, x: int, y: int, z: int) -> bool:
    mul = lambda a, b: A.apply("mul", (a, b))  # noqa: E731
    return (
        y in B and mul(x, y) in B and mul(y, z) in B and mul(mul(x, y), z) not in B
    )


class _Search:
    def __init__(self, n: int, z: int):
        self.n = n
        self.z = z
        self.t = [[-1] * n for _ in range(n)]
        self.cells = sorted(itertools.product(range(n), repeat=2), key=lambda c: (max(c), c))
        self.pinned = max(1, z)

    def _assoc_ok(self, a: int, b: int) -> bool:
        t, n = self.t, self.n
        # every associativity instance that reads cell (a, b)
        for p, q, r in self._touching(a, b):
            pq = t[p][q]
            if pq < 0:
                continue
            left = t[pq][r]
            if left < 0:
                continue
            qr = t[q][r]
            if qr < 0:
                continue
            right = t[p][qr]
            if right >= 0 and right != left:
                return False
        return True

    def _touching(self, a: int, b: int):
        t, n = self.t, self.n
        for r in range(n):
            yield a, b, r  # (ab)r
        for p in range(n):
            yield p, a, b  # p(ab)
        for p in range(n):
            for q in range(n):
                if t[p][q] == a:
                    yield p, q, b  # (pq)b with pq = a
        for q in range(n):
            for r in range(n):
                if t[q][r] == b:
                    yield a, q, r  # a(qr) with qr = b

    def _closure_ok(self) -> bool:
        t, x, y, z = self.t, 0, 1, self.z
        seeds = {y}
        for u in (t[x][y], t[y][z]):
            if u >= 0:
                seeds.add(u)
        closed = set(seeds)
        frontier = list(seeds)
        while frontier:
            new = []
            for a in frontier:
                for b in list(closed):
                    for c in (t[a][b], t[b][a]):
                        if c >= 0 and c not in closed:
                            closed.add(c)
                            new.append(c)
            frontier = new
        if x in closed or z in closed:
            return False
        xy = t[x][y]
        if xy >= 0 and t[xy][z] >= 0 and t[xy][z] in closed:
            return False
        return True

    def run(self):
        yield from self._fill(0, self.pinned)

    def _fill(self, k: int, top: int):
        if k == len(self.cells):
            yield [row[:] for row in self.t]
            return
        a, b = self.cells[k]
        top = max(top, a, b)
        for v in range(min(self.n, top + 2)):
            self.t[a][b] = v
            if self._assoc_ok(a, b) and self._closure_ok():
                yield from self._fill(k + 1, max(top, v))
        self.t[a][b] = -1


def search_size(n: int, budget: Budget = DEFAULT_BUDGET) -> ZigzagInstance | None:
    """First configuration on exactly ``n`` elements (deterministic order), or None."""
    if n < 2:
        return None
    for z in (0, 2):
        if z >= n:
            continue
        for table in _Search(n, z).run():
            A = FiniteAlgebra.from_tables(
                SEMIGROUP, n, {"mul": [v for row in table for v in row]}, f"zigzag{n}"
            )
            mul = lambda a, b: A.apply("mul", (a, b))  # noqa: E731
            B = generate_subalgebra(A, [1, mul(0, 1), mul(1, z)])
            if is_zigzag(A, B, 0, 1, z):
                return ZigzagInstance(A, B, 0, 1, z)
    return None


def find_zigzag_instance(max_size: int, budget: Budget = DEFAULT_BUDGET) -> ZigzagInstance | None:
    """Smallest-size configuration with ``xyz`` outside ``B``, searching sizes ``1..max_size``."""
    for n in range(1, max_size + 1):
        hit = search_size(n, budget)
        if hit is not None:
            return hit
    return None


def zigzag_census(max_size: int, budget: Budget = DEFAULT_BUDGET) -> dict:
    """Exhaustive count over all semigroups, subsemigroups ``B != A`` and triples.

    Returns, per size, how many configurations with ``y, xy, yz`` in B exist
    and how many of them have ``xyz`` outside B.
    """
    from uadom.algebra import all_subalgebras

    report = {}
    for n in range(1, max_size + 1):
        total = nontrivial = 0
        for A in enumerate_models(SEMIGROUP, n, SEMIGROUP_IDS, budget=budget):
            mul = lambda a, b: A.apply("mul", (a, b))  # noqa: E731
            for B in all_subalgebras(A):
                if len(B.members) == n:
                    continue
                for x, y, z in itertools.product(A.elements, repeat=3):
                    if y in B and mul(x, y) in B and mul(y, z) in B:
                        total += 1
                        if mul(mul(x, y), z) not in B:
                            nontrivial += 1
        report[n] = {"configurations": total, "nontrivial": nontrivial}
    return report


def rees_example() -> ZigzagInstance:
    """Hand-built check instance: words in x, y that are factors of ``xyx``, plus a zero.

    Elements ``x, y, xy, yx, xyx, 0`` with ``B = {y, xy, yx, 0}``.
    """
    words = ["x", "y", "xy", "yx", "xyx", "0"]
    index = {w: i for i, w in enumerate(words)}

    def mul(a: int, b: int) -> int:
        u, v = words[a], words[b]
        if "0" in (u, v):
            return index["0"]
        return index.get(u + v, index["0"])

    A = FiniteAlgebra.from_function(SEMIGROUP, 6, {"mul": mul}, "factors-of-xyx")
    B = make_subalgebra(A, [index[w] for w in ("y", "xy", "yx", "0")])
    return ZigzagInstance(A, B, index["x"], index["y"], index["x"])
