"""Standard signatures, identities and small algebras used by tests and scenarios."""

from __future__ import annotations

import itertools

from uadom.algebra import FiniteAlgebra, Identity
from uadom.terms import Signature, Term, Var, app, parse_term

SEMIGROUP = Signature.of(("mul", 2))
GROUP = Signature.of(("mul", 2), ("inv", 1), ("e", 0))

x, y, z = Var("x"), Var("y"), Var("z")


def identity(text: str, sig: Signature) -> Identity:
    lhs, rhs = text.split("=")
    return Identity(parse_term(lhs.strip(), sig), parse_term(rhs.strip(), sig))


ASSOCIATIVITY = identity("(mul (mul x y) z) = (mul x (mul y z))", SEMIGROUP)
COMMUTATIVITY = identity("(mul x y) = (mul y x)", SEMIGROUP)
SEMIGROUP_IDS = (ASSOCIATIVITY,)

GROUP_IDS = (
    identity("(mul (mul x y) z) = (mul x (mul y z))", GROUP),
    identity("(mul e x) = x", GROUP),
    identity("(mul x e) = x", GROUP),
    identity("(mul (inv x) x) = e", GROUP),
    identity("(mul x (inv x)) = e", GROUP),
)


def commutator(a: Term, b: Term) -> Term:
    """``[a, b] = a^-1 b^-1 a b``."""
    return app("mul", app("mul", app("inv", a), app("inv", b)), app("mul", a, b))


def power(a: Term, n: int, sig_op: str = "mul") -> Term:
    if n < 1:
        raise ValueError("power needs n >= 1")
    t = a
    for _ in range(n - 1):
        t = app(sig_op, t, a)
    return t


NILPOTENT2 = Identity(commutator(commutator(x, y), z), app("e"))
NILPOTENT2_IDS = GROUP_IDS + (NILPOTENT2,)


def commutator_power_identity(n: int) -> Identity:
    """``[x, y^n] = [x^n, y]``."""
    return Identity(commutator(x, power(y, n)), commutator(power(x, n), y))


# ---------------------------------------------------------------------------
# algebras

def semilattice2() -> FiniteAlgebra:
    return FiniteAlgebra.from_function(SEMIGROUP, 2, {"mul": min}, "semilattice2")


def left_zero(n: int = 2) -> FiniteAlgebra:
    return FiniteAlgebra.from_function(SEMIGROUP, n, {"mul": lambda a, b: a}, f"left-zero{n}")


def capped_multiplication(cap: int = 12) -> FiniteAlgebra:
    """Values ``1..cap`` (index ``v - 1``) under ``min(a * b, cap)``."""
    return FiniteAlgebra.from_function(
        SEMIGROUP, cap, {"mul": lambda a, b: min((a + 1) * (b + 1), cap) - 1}, f"capped{cap}"
    )


def multiplication_mod(n: int) -> FiniteAlgebra:
    """The multiplicative semigroup of integers modulo ``n``."""
    return FiniteAlgebra.from_function(SEMIGROUP, n, {"mul": lambda a, b: a * b % n}, f"Z/{n}")


def trivial(sig: Signature) -> FiniteAlgebra:
    return FiniteAlgebra.from_function(sig, 1, {op: (lambda *a: 0) for op in sig.names}, "trivial")


def group_from_elements(elements, mul, name: str = "") -> FiniteAlgebra:
    """Build a group table from a list of elements (identity first) and a product."""
    elements = list(elements)
    index = {g: i for i, g in enumerate(elements)}
    n = len(elements)
    mul_t = [index[mul(elements[a], elements[b])] for a, b in itertools.product(range(n), repeat=2)]
    e = next(i for i in range(n) if all(mul_t[i * n + j] == j for j in range(n)))
    inv_t = [next(b for b in range(n) if mul_t[a * n + b] == e) for a in range(n)]
    return FiniteAlgebra.from_tables(GROUP, n, {"mul": mul_t, "inv": inv_t, "e": [e]}, name)


def cyclic_group(n: int) -> FiniteAlgebra:
    return group_from_elements(range(n), lambda a, b: (a + b) % n, f"Z{n}")


def symmetric_group3() -> FiniteAlgebra:
    perms = sorted(itertools.permutations(range(3)))
    # (p * q)(i) = p(q(i))
    return group_from_elements(perms, lambda p, q: tuple(p[q[i]] for i in range(3)), "S3")


def heisenberg(p: int = 3) -> FiniteAlgebra:
    """Upper unitriangular 3x3 matrices over Z/p; ``(a, b, c)`` has index ``a*p*p + b*p + c``.

    ``(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')``.
    """
    elements = list(itertools.product(range(p), repeat=3))

    def mul(g, h):
        a, b, c = g
        a2, b2, c2 = h
        return ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)

    return group_from_elements(elements, mul, f"Heisenberg({p})")


def heisenberg_element(a: int, b: int, c: int, p: int = 3) -> int:
    return (a * p + b) * p + c
