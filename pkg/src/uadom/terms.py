"""Signatures, terms, the s-expression term syntax, substitution and evaluation.

Terms are immutable trees built from three node kinds:

* ``Var(name)`` -- a variable leaf,
* ``Gen(side, element)`` -- a tagged generator ``L:<a>`` / ``R:<a>`` of the
  amalgamated coproduct (the images of ``a`` under the left/right insertion),
* ``App(op, args)`` -- an operation applied to argument terms.

All traversals are iterative so deep terms do not hit the interpreter's
recursion limit; the parser enforces an explicit depth cap instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Union

from uadom.errors import EvaluationError, ParseError

DEFAULT_MAX_DEPTH = 64

LEFT = "L"
RIGHT = "R"


@dataclass(frozen=True)
class Signature:
    """An ordered list of ``(name, arity)`` pairs with unique names."""

    ops: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.ops]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate operation names in signature: {names}")
        for name, arity in self.ops:
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")

    @classmethod
    def of(cls, *ops: tuple[str, int]) -> "Signature":
        return cls(tuple(ops))

    def arity(self, name: str) -> int:
        for op, k in self.ops:
            if op == name:
                return k
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(op == name for op, _ in self.ops)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ops)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(name for name, k in self.ops if k == 0)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Gen:
    side: str
    element: Hashable

    def __post_init__(self) -> None:
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be 'L' or 'R', got {self.side!r}")

    def __str__(self) -> str:
        return f"{self.side}:{self.element}"


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, Gen, App]


def app(op: str, *args: Term) -> App:
    return App(op, tuple(args))


def fold(term: Term, leaf: Callable[[Term], Any], node: Callable[[App, list], Any]) -> Any:
    """Post-order fold over ``term`` without recursion.

    ``leaf`` is called on ``Var``/``Gen`` leaves, ``node`` on each ``App``
    with the list of already-folded children.
    """
    stack: list[tuple[Term, bool]] = [(term, False)]
    values: list[Any] = []
    while stack:
        t, expanded = stack.pop()
        if not isinstance(t, App):
            values.append(leaf(t))
        elif expanded:
            k = len(t.args)
            children = values[len(values) - k:] if k else []
            del values[len(values) - k:]
            values.append(node(t, children))
        else:
            stack.append((t, True))
            for arg in reversed(t.args):
                stack.append((arg, False))
    return values[0]


def subterms(term: Term) -> Iterator[Term]:
    """Yield every subterm (pre-order, left to right)."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, App):
            stack.extend(reversed(t.args))


def variables(term: Term) -> list[str]:
    """Distinct variable names in order of first occurrence."""
    seen: dict[str, None] = {}
    for t in subterms(term):
        if isinstance(t, Var):
            seen.setdefault(t.name, None)
    return list(seen)


def generators(term: Term) -> list[Gen]:
    seen: dict[Gen, None] = {}
    for t in subterms(term):
        if isinstance(t, Gen):
            seen.setdefault(t, None)
    return list(seen)


def depth(term: Term) -> int:
    return fold(term, lambda _: 0, lambda _, ch: 1 + max(ch, default=0))


def size(term: Term) -> int:
    return sum(1 for _ in subterms(term))


def check_term(term: Term, sig: Signature) -> None:
    """Raise ``ValueError`` if some application disagrees with ``sig``."""
    for t in subterms(term):
        if isinstance(t, App):
            if t.op not in sig:
                raise ValueError(f"unknown operation {t.op!r}")
            if sig.arity(t.op) != len(t.args):
                raise ValueError(
                    f"operation {t.op!r} has arity {sig.arity(t.op)}, applied to {len(t.args)}"
                )


# ---------------------------------------------------------------------------
# printing and parsing

def format_term(term: Term) -> str:
    def node(t: App, children: list[str]) -> str:
        if not children:
            return t.op
        return "(" + " ".join([t.op, *children]) + ")"

    return fold(term, str, node)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'.]*\Z")
_TAGGED = re.compile(r"([LR]):(\d+)\Z")


def _tokenize(text: str) -> Iterator[tuple[int, str]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                return
            raise ParseError("unexpected character", _byte_offset(text, pos))
        tok = m.group(1) or m.group(2) or m.group(3)
        start = m.start(m.lastindex)
        yield _byte_offset(text, start), tok
        pos = m.end()


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def parse_term(
    text: str,
    sig: Signature,
    *,
    tagged: bool = False,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Term:
    """Parse a prefix s-expression such as ``(mul x (mul y z))``.

    Bare identifiers are variables unless they name a nullary operation, in
    which case they denote that constant (``(e)`` is also accepted).  With
    ``tagged=True`` the leaves ``L:<int>`` and ``R:<int>`` parse to ``Gen``.
    Errors carry the byte offset of the offending token.
    """
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty term", 0)

    # frames: [op, op_offset, args]
    frames: list[list] = []
    result: Term | None = None
    i = 0
    while i < len(tokens):
        offset, tok = tokens[i]
        if result is not None:
            raise ParseError("trailing input after term", offset)
        if tok == "(":
            if i + 1 >= len(tokens):
                raise ParseError("unbalanced parentheses: missing operation", offset)
            op_offset, op = tokens[i + 1]
            if op in ("(", ")"):
                raise ParseError("expected operation name", op_offset)
            if op not in sig:
                raise ParseError(f"unknown operation {op!r}", op_offset)
            if len(frames) >= max_depth:
                raise ParseError(f"term deeper than max_depth={max_depth}", offset)
            frames.append([op, offset, []])
            i += 2
            continue
        if tok == ")":
            if not frames:
                raise ParseError("unbalanced parentheses: unexpected ')'", offset)
            op, op_offset, args = frames.pop()
            if len(args) != sig.arity(op):
                raise ParseError(
                    f"arity mismatch: {op!r} expects {sig.arity(op)} argument(s), got {len(args)}",
                    op_offset,
                )
            t: Term = App(op, tuple(args))
        else:
            t = _leaf(tok, offset, sig, tagged)
        if frames:
            frames[-1][2].append(t)
        else:
            result = t
        i += 1
    if frames:
        raise ParseError("unbalanced parentheses: missing ')'", frames[-1][1])
    assert result is not None
    return result


def _leaf(tok: str, offset: int, sig: Signature, tagged: bool) -> Term:
    if tagged:
        m = _TAGGED.match(tok)
        if m:
            return Gen(m.group(1), int(m.group(2)))
    if tok in sig:
        if sig.arity(tok) != 0:
            raise ParseError(
                f"arity mismatch: {tok!r} expects {sig.arity(tok)} argument(s), got 0", offset
            )
        return App(tok)
    if not _IDENT.match(tok):
        raise ParseError(f"invalid identifier {tok!r}", offset)
    return Var(tok)


# ---------------------------------------------------------------------------
# substitution and evaluation

def substitute(term: Term, subst: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; variables outside ``subst`` are kept."""
    if not subst:
        return term

    def leaf(t: Term) -> Term:
        if isinstance(t, Var):
            return subst.get(t.name, t)
        return t

    return fold(term, leaf, lambda t, ch: App(t.op, tuple(ch)))


def rename(term: Term, mapping: Mapping[str, str]) -> Term:
    return substitute(term, {old: Var(new) for old, new in mapping.items()})


def tag(term: Term, assignment: Mapping[str, Hashable], sides: Mapping[str, str]) -> Term:
    """Replace each variable ``s`` by the generator ``sides[s]:assignment[s]``."""
    return substitute(term, {s: Gen(sides[s], assignment[s]) for s in variables(term)})


def evaluate(
    term: Term,
    alg: Any,
    assignment: Mapping[str, Any] | None = None,
    *,
    gen: Callable[[Gen], Any] | None = None,
) -> Any:
    """Evaluate bottom-up in ``alg`` (anything with ``apply(op, args)``).

    ``Gen`` leaves evaluate through ``gen`` when given; otherwise a tagged
    generator evaluates to its underlying element, i.e. through the fold map
    that sends both insertions to the identity.
    """
    env = assignment or {}

    def leaf(t: Term) -> Any:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvaluationError(f"unbound variable {t.name!r}") from None
        if gen is not None:
            return gen(t)
        return t.element

    return fold(term, leaf, lambda t, ch: alg.apply(t.op, tuple(ch)))


def ordered_variables(terms: Iterable[Term], order: Iterable[str] | None = None) -> list[str]:
    """Variables of ``terms`` in first-occurrence order, or in ``order`` if given."""
    found: dict[str, None] = {}
    for t in terms:
        for v in variables(t):
            found.setdefault(v, None)
    if order is None:
        return list(found)
    order = list(order)
    missing = [v for v in found if v not in order]
    if missing:
        raise ValueError(f"variable order omits {missing}")
    return order
