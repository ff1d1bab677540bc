"""Plain-text file formats: algebras, identity lists, equational arrays and subset collections.

Algebra file::

    algebra size=3 name=Z3
    op mul arity=2
    op e arity=0
    table mul
    0 1 2
    1 2 0
    2 0 1
    table e
    0
    sub 0

Tables are row-major with the last argument varying fastest; numbers may
be spread over any number of lines.  ``sub`` lines name the elements of a
subalgebra and are optional.  ``#`` starts a comment everywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from uadom.algebra import FiniteAlgebra, Identity, Subalgebra, make_subalgebra
from uadom.errors import ParseError
from uadom.terms import Signature, Term, format_term, parse_term


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _kv(tokens: Sequence[str], line: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", line=line)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


@dataclass(frozen=True)
class AlgebraFile:
    algebra: FiniteAlgebra
    subalgebras: tuple[Subalgebra, ...] = ()

    @property
    def B(self) -> Subalgebra:
        if not self.subalgebras:
            raise ValueError("algebra file has no 'sub' line")
        return self.subalgebras[0]


def parse_algebra(text: str) -> AlgebraFile:
    lines = _lines(text)
    if not lines or not lines[0][1].startswith("algebra"):
        raise ParseError("file must start with an 'algebra size=N' header", line=lines[0][0] if lines else 1)
    no, header = lines[0]
    kv = _kv(header.split()[1:], no)
    try:
        size = int(kv["size"])
    except (KeyError, ValueError):
        raise ParseError("header needs an integer size=N", line=no) from None
    name = kv.get("name", "")
    ops: list[tuple[str, int]] = []
    tables: dict[str, list[int]] = {}
    subs: list[tuple[int, list[int]]] = []
    current: str | None = None
    for no, line in lines[1:]:
        words = line.split()
        if words[0] == "op":
            if len(words) != 3:
                raise ParseError("expected 'op NAME arity=K'", line=no)
            arity = _kv(words[2:], no).get("arity")
            if arity is None or not arity.isdigit():
                raise ParseError("op needs arity=K", line=no)
            ops.append((words[1], int(arity)))
            current = None
        elif words[0] == "table":
            if len(words) != 2 or words[1] not in dict(ops):
                raise ParseError(f"table for undeclared operation: {line!r}", line=no)
            current = words[1]
            if current in tables:
                raise ParseError(f"duplicate table {current!r}", line=no)
            tables[current] = []
        elif words[0] == "sub":
            body = line[3:].strip()
            try:
                members = [int(v) for v in re.split(r"[,\s]+", body) if v]
            except ValueError:
                raise ParseError("sub expects comma-separated element indices", line=no) from None
            subs.append((no, members))
            current = None
        else:
            if current is None:
                raise ParseError(f"unexpected line {line!r}", line=no)
            try:
                tables[current].extend(int(v) for v in words)
            except ValueError:
                raise ParseError("table entries must be integers", line=no) from None
    try:
        sig = Signature(tuple(ops))
        for op, _ in ops:
            if op not in tables:
                raise ValueError(f"missing table for {op!r}")
        alg = FiniteAlgebra.from_tables(sig, size, tables, name)
    except ValueError as exc:
        raise ParseError(str(exc), line=no) from None
    subalgebras = []
    for no, members in subs:
        try:
            subalgebras.append(make_subalgebra(alg, members))
        except ValueError as exc:
            raise ParseError(str(exc), line=no) from None
    return AlgebraFile(alg, tuple(subalgebras))


def format_algebra(alg: FiniteAlgebra, subs: Iterable[Subalgebra] = ()) -> str:
    head = f"algebra size={alg.size}" + (f" name={alg.name}" if alg.name and " " not in alg.name else "")
    out = [head]
    for op, k in alg.sig.ops:
        out.append(f"op {op} arity={k}")
    for op, k in alg.sig.ops:
        out.append(f"table {op}")
        table = alg.table(op)
        width = alg.size if k >= 1 else 1
        for i in range(0, len(table), width):
            out.append(" ".join(str(v) for v in table[i:i + width]))
    for sub in subs:
        out.append("sub " + ",".join(str(a) for a in sorted(sub.members)))
    return "\n".join(out) + "\n"


def load_algebra(path: str | Path) -> AlgebraFile:
    return parse_algebra(Path(path).read_text(encoding="utf-8"))


def parse_identities(text: str, sig: Signature) -> list[Identity]:
    """One ``lhs = rhs`` per line."""
    out = []
    for no, line in _lines(text):
        if line.count("=") != 1:
            raise ParseError("identity line needs exactly one '='", line=no)
        lhs, rhs = line.split("=")
        try:
            out.append(Identity(parse_term(lhs, sig), parse_term(rhs, sig)))
        except ParseError as exc:
            raise ParseError(exc.message, exc.offset, line=no) from None
    return out


def format_identities(ids: Iterable[Identity]) -> str:
    return "".join(f"{format_term(i.lhs)} = {format_term(i.rhs)}\n" for i in ids)


# ---------------------------------------------------------------------------
# subset collections

def parse_collection(text: str, names: Sequence[str]) -> list[int]:
    """Subsets as bit masks over ``names``; ``{}`` is the empty set."""
    index = {n: i for i, n in enumerate(names)}
    out = []
    for no, line in _lines(text):
        body = line.strip()
        if body.startswith("{") and body.endswith("}"):
            body = body[1:-1]
        mask = 0
        for label in (s.strip() for s in body.split(",")):
            if not label:
                continue
            if label not in index:
                raise ParseError(f"unknown element {label!r}", line=no)
            mask |= 1 << index[label]
        out.append(mask)
    return out


def format_collection(masks: Iterable[int], names: Sequence[str]) -> str:
    lines = []
    for mask in masks:
        labels = [names[i] for i in range(len(names)) if mask >> i & 1]
        lines.append(",".join(labels) if labels else "{}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# equational arrays

_ARRAY_HEAD = re.compile(r"array\s+m=(\d+)\s+sig=([\d,\s]+)\Z")
_OUTER = re.compile(r"W(\d+)\s*=\s*(.+)\Z")
_INNER = re.compile(r"w(\d+)[_,]?(\d+)\s*=\s*(.+)\Z")


def parse_array_text(text: str, sig: Signature):
    """Parse the array format into an :class:`uadom.arrays.EquationalArray`.

    ``array m=2 sig=1,1`` then ``W<i> = term in a1..am`` and
    ``w<i><j> = term in x1..xnj`` (``w<i>_<j>`` also accepted when m > 9).
    """
    from uadom.arrays import EquationalArray

    lines = _lines(text)
    if not lines:
        raise ParseError("empty array file", line=1)
    no, head = lines[0]
    m_head = _ARRAY_HEAD.match(head)
    if not m_head:
        raise ParseError("expected header 'array m=<m> sig=<n1,...,nm>'", line=no)
    m = int(m_head.group(1))
    nsig = tuple(int(v) for v in m_head.group(2).replace(" ", "").split(",") if v)
    if len(nsig) != m:
        raise ParseError(f"signature lists {len(nsig)} entries for m={m}", line=no)
    outer: dict[int, Term] = {}
    inner: dict[tuple[int, int], Term] = {}
    for no, line in lines[1:]:
        mo = _OUTER.match(line)
        mi = _INNER.match(line)
        try:
            if mo:
                outer[int(mo.group(1))] = parse_term(mo.group(2), sig)
            elif mi:
                digits = mi.group(1) + mi.group(2)
                if "_" in line.split("=")[0] or "," in line.split("=")[0]:
                    i, j = int(mi.group(1)), int(mi.group(2))
                elif len(digits) == 2:
                    i, j = int(digits[0]), int(digits[1])
                else:
                    raise ParseError("ambiguous inner word index; use w<i>_<j>", line=no)
                inner[(i, j)] = parse_term(mi.group(3), sig)
            else:
                raise ParseError(f"unexpected line {line!r}", line=no)
        except ParseError as exc:
            if exc.line is not None:
                raise
            raise ParseError(exc.message, exc.offset, line=no) from None
    try:
        return EquationalArray(
            m,
            nsig,
            tuple(outer[i] for i in range(1, m + 1)),
            tuple(tuple(inner[(i, j)] for j in range(1, m + 1)) for i in range(1, m + 1)),
        )
    except KeyError as exc:
        raise ParseError(f"missing word {exc.args[0]}", line=lines[-1][0]) from None
    except ValueError as exc:
        raise ParseError(str(exc), line=lines[-1][0]) from None


def format_array(arr) -> str:
    out = [f"array m={arr.m} sig={','.join(str(n) for n in arr.nsig)}"]
    for i, W in enumerate(arr.outer, 1):
        out.append(f"W{i} = {format_term(W)}")
    sep = "_" if arr.m > 9 else ""
    for i, row in enumerate(arr.inner, 1):
        for j, w in enumerate(row, 1):
            out.append(f"w{i}{sep}{j} = {format_term(w)}")
    return "\n".join(out) + "\n"
