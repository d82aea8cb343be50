"""Canonical series-parallel terms.

An sp-pomset is stored as a canonical term: sequential nodes are flattened
lists of non-sequential parts, parallel nodes are sorted multisets of
non-parallel parts, and the empty pomset ``1`` never occurs below the root.
Two values are equal exactly when they denote the same pomset, so ``==`` and
``hash`` are cheap and no poset isomorphism is ever computed.

Contexts are terms containing exactly one hole, printed as ``_``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence
from typing import NamedTuple

EMPTY, LETTER, HOLE, SEQ, PAR = "empty", "letter", "hole", "seq", "par"

_IDENT = re.compile(r"[a-z][A-Za-z0-9]*\Z")


class Pomset:
    """An immutable canonical sp-term.

    Use the module-level constructors (:func:`letter`, :func:`seq`,
    :func:`par`, :func:`parse`) rather than instantiating directly.
    """

    __slots__ = ("kind", "label", "parts", "size", "holes", "_text", "_hash")

    def __init__(self, kind: str, label: str | None = None, parts: tuple = ()):
        self.kind = kind
        self.label = label
        self.parts = parts
        if kind == LETTER:
            self.size, self.holes = 1, 0
        elif kind == HOLE:
            self.size, self.holes = 0, 1
        else:
            self.size = sum(p.size for p in parts)
            self.holes = sum(p.holes for p in parts)
        self._text = _render(self)
        self._hash = hash(self._text)

    def __setattr__(self, name, value):
        if hasattr(self, "_hash"):
            raise AttributeError("pomsets are immutable")
        object.__setattr__(self, name, value)

    def __eq__(self, other):
        if isinstance(other, Pomset):
            return self._text == other._text
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __str__(self):
        return self._text

    def __repr__(self):
        return f"{type(self).__name__}({self._text!r})"

    @property
    def key(self) -> tuple[int, str]:
        """Sort key used everywhere a deterministic order is needed."""
        return (self.size, self._text)

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY

    @property
    def operations(self) -> int:
        """Number of binary compositions needed to build this term from letters."""
        return max(self.size - 1, 0)

    def letters(self) -> set[str]:
        if self.kind == LETTER:
            return {self.label}
        out: set[str] = set()
        for p in self.parts:
            out |= p.letters()
        return out


class Context(Pomset):
    """A term over the alphabet plus one hole."""

    __slots__ = ()


def _render(t: Pomset) -> str:
    if t.kind == EMPTY:
        return "1"
    if t.kind == LETTER:
        return t.label
    if t.kind == HOLE:
        return "_"
    if t.kind == SEQ:
        return ".".join(f"({p._text})" if p.kind == PAR else p._text for p in t.parts)
    return "|".join(p._text for p in t.parts)


def _make(kind: str, label: str | None = None, parts: tuple = ()) -> Pomset:
    holes = 1 if kind == HOLE else sum(p.holes for p in parts)
    if holes > 1:
        raise ValueError("a context may contain only one hole")
    cls = Context if holes else Pomset
    return cls(kind, label, parts)


ONE = _make(EMPTY)
HOLE_TERM = _make(HOLE)


def letter(symbol: str) -> Pomset:
    if not _IDENT.match(symbol):
        raise ValueError(f"invalid letter {symbol!r}")
    return _make(LETTER, symbol)


def seq(*terms: Pomset) -> Pomset:
    """Sequential composition, flattened and unit-free."""
    flat: list[Pomset] = []
    for t in terms:
        if t.kind == EMPTY:
            continue
        flat.extend(t.parts if t.kind == SEQ else (t,))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return _make(SEQ, parts=tuple(flat))


def par(*terms: Pomset) -> Pomset:
    """Parallel composition; children are kept sorted by their printed form."""
    flat: list[Pomset] = []
    for t in terms:
        if t.kind == EMPTY:
            continue
        flat.extend(t.parts if t.kind == PAR else (t,))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=str)
    return _make(PAR, parts=tuple(flat))


def compose(op: str, u: Pomset, v: Pomset) -> Pomset:
    if op == SEQ:
        return seq(u, v)
    if op == PAR:
        return par(u, v)
    raise ValueError(f"unknown operation {op!r}")


class Split(NamedTuple):
    left: Pomset
    op: str
    right: Pomset


def decompose(u: Pomset) -> Split | None:
    """Split a term with at least two letters into two non-empty halves.

    Sequential terms split into head and tail, parallel terms into their
    least child and the rest. Returns ``None`` for ``1`` and for letters.
    """
    if u.kind == SEQ:
        return Split(u.parts[0], SEQ, seq(*u.parts[1:]))
    if u.kind == PAR:
        return Split(u.parts[0], PAR, par(*u.parts[1:]))
    return None


def plug(c: Pomset, t: Pomset) -> Pomset:
    """Substitute ``t`` for the hole of ``c``; the result is re-canonicalised.

    ``t`` may itself be a context, which gives context composition.
    """
    if c.holes == 0:
        return c
    if c.kind == HOLE:
        return t
    parts = [plug(p, t) for p in c.parts]
    return seq(*parts) if c.kind == SEQ else par(*parts)


def plug_context(c: Context, d: Context) -> Context:
    out = plug(c, d)
    assert isinstance(out, Context)
    return out


def subterms(u: Pomset) -> set[Pomset]:
    """All nodes of the canonical term ``u``, plus ``u`` itself and ``1``."""
    out = {ONE}
    stack = [u]
    while stack:
        t = stack.pop()
        if t not in out:
            out.add(t)
            stack.extend(t.parts)
    return out


# -- enumeration -----------------------------------------------------------


def enumerate_pomsets(alphabet: Iterable[str], max_nodes: int) -> Iterator[Pomset]:
    """Yield every sp-pomset with at most ``max_nodes`` letters exactly once.

    Order is by letter count, then by printed form.
    """
    if max_nodes < 0:
        raise ValueError("max_nodes must be non-negative")
    by_size = _by_size(tuple(sorted(alphabet)), max_nodes)
    yield ONE
    for n in range(1, max_nodes + 1):
        yield from by_size[n]


def _by_size(alphabet: tuple[str, ...], max_nodes: int) -> list[list[Pomset]]:
    # nonseq[n] / nonpar[n]: terms of size n whose root is not SEQ / not PAR.
    terms: list[list[Pomset]] = [[ONE]]
    nonseq: list[list[Pomset]] = [[]]
    nonpar: list[list[Pomset]] = [[]]
    for n in range(1, max_nodes + 1):
        letters = [letter(a) for a in alphabet] if n == 1 else []
        seqs = []
        for k in range(1, n):
            for head in nonseq[k]:
                for tail in terms[n - k]:
                    seqs.append(seq(head, tail))
        pars = list(_par_multisets(nonpar, n))
        nonseq.append(letters + pars)
        nonpar.append(letters + seqs)
        terms.append(sorted(set(letters + seqs + pars), key=lambda t: t.key))
    return terms


def _par_multisets(nonpar: list[list[Pomset]], n: int) -> Iterator[Pomset]:
    pool = [t for k in range(1, n) for t in nonpar[k]]

    def rec(start: int, remaining: int, chosen: list[Pomset]):
        if remaining == 0:
            if len(chosen) >= 2:
                yield par(*chosen)
            return
        for i in range(start, len(pool)):
            t = pool[i]
            if t.size <= remaining:
                chosen.append(t)
                yield from rec(i, remaining - t.size, chosen)
                chosen.pop()

    yield from rec(0, n, [])


# -- text syntax -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([a-z][A-Za-z0-9]*)|(1)|(_)|([().|]))")


class ParseError(ValueError):
    pass


def parse(text: str) -> Pomset:
    """Parse ``term := par; par := seq ('|' seq)*; seq := atom ('.' atom)*``."""
    tokens: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    parser = _Parser(tokens, text)
    result = parser.parse_par()
    if parser.i != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return result


def parse_context(text: str) -> Context:
    t = parse(text)
    if not isinstance(t, Context):
        raise ParseError(f"context {text!r} has no hole")
    return t


class _Parser:
    def __init__(self, tokens: Sequence[str], text: str):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def parse_par(self) -> Pomset:
        parts = [self.parse_seq()]
        while self.peek() == "|":
            self.i += 1
            parts.append(self.parse_seq())
        return par(*parts)

    def parse_seq(self) -> Pomset:
        parts = [self.parse_atom()]
        while self.peek() == ".":
            self.i += 1
            parts.append(self.parse_atom())
        return seq(*parts)

    def parse_atom(self) -> Pomset:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of {self.text!r}")
        self.i += 1
        if tok == "(":
            inner = self.parse_par()
            if self.peek() != ")":
                raise ParseError(f"missing ')' in {self.text!r}")
            self.i += 1
            return inner
        if tok == "1":
            return ONE
        if tok == "_":
            return HOLE_TERM
        if tok in ").|":
            raise ParseError(f"unexpected {tok!r} in {self.text!r}")
        return letter(tok)
