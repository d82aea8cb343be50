"""Finite bimonoids and pomset recognisers.

Elements are small integers indexing a name table; both operations are
dense ``numpy`` tables with the left operand as row index.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import reduce
from typing import Any

import numpy as np

from . import pomset as pm
from .errors import (
    AlphabetMismatch,
    ClosureDiverged,
    FormatError,
    InvalidBimonoid,
    UnknownLetter,
)
from .pomset import PAR, SEQ, Pomset

SEQ_ASSOC = "seq-associativity"
PAR_ASSOC = "par-associativity"
PAR_COMM = "par-commutativity"
SEQ_UNIT = "seq-unit"
PAR_UNIT = "par-unit"
RANGE = "table-range"
LAWS = (RANGE, SEQ_UNIT, PAR_UNIT, PAR_COMM, SEQ_ASSOC, PAR_ASSOC)


@dataclass(eq=False)
class Bimonoid:
    elements: tuple[str, ...]
    unit: int
    seq_table: np.ndarray
    par_table: np.ndarray

    def __post_init__(self):
        self.elements = tuple(self.elements)
        self.seq_table = np.asarray(self.seq_table, dtype=np.intp)
        self.par_table = np.asarray(self.par_table, dtype=np.intp)
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise InvalidBimonoid("duplicate element names")
        if self.seq_table.shape != (n, n) or self.par_table.shape != (n, n):
            raise InvalidBimonoid(f"operation tables must be {n}x{n}")
        if not 0 <= self.unit < n:
            raise InvalidBimonoid("unit is not an element")

    def __len__(self):
        return len(self.elements)

    def seq(self, x: int, y: int) -> int:
        return int(self.seq_table[x, y])

    def par(self, x: int, y: int) -> int:
        return int(self.par_table[x, y])

    def op(self, kind: str, x: int, y: int) -> int:
        return self.seq(x, y) if kind == SEQ else self.par(x, y)

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise KeyError(f"no element named {name!r}") from None


@dataclass
class Violation:
    law: str
    witness: tuple[int, ...]

    def describe(self, names: Sequence[str]) -> str:
        return f"{self.law} fails at ({', '.join(names[w] for w in self.witness)})"


@dataclass
class AxiomReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __bool__(self):
        return self.ok


def validate_axioms(b: Bimonoid) -> AxiomReport:
    """Exhaustively check the bimonoid laws, reporting the first witness per law."""
    report = AxiomReport()
    n = len(b)
    S, P, u = b.seq_table, b.par_table, b.unit

    def first(law, mask):
        hits = np.argwhere(mask)
        if len(hits):
            report.violations.append(Violation(law, tuple(int(i) for i in hits[0])))

    first(RANGE, (S < 0) | (S >= n) | (P < 0) | (P >= n))
    if not report.ok:
        return report
    idx = np.arange(n)
    first(SEQ_UNIT, (S[u, :] != idx) | (S[:, u] != idx))
    first(PAR_UNIT, (P[u, :] != idx) | (P[:, u] != idx))
    first(PAR_COMM, P != P.T)
    for law, T in ((SEQ_ASSOC, S), (PAR_ASSOC, P)):
        lhs = T[T]  # lhs[x, y, z] = (x op y) op z
        rhs = T[idx[:, None, None], T[None, :, :]]  # x op (y op z)
        first(law, lhs != rhs)
    return report


@dataclass(eq=False)
class Recogniser:
    """A finite bimonoid with a letter interpretation and accepting set."""

    bimonoid: Bimonoid
    alphabet: tuple[str, ...]
    interpretation: dict[str, int]
    accepting: frozenset[int]

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        self.accepting = frozenset(int(x) for x in self.accepting)
        n = len(self.bimonoid)
        if set(self.interpretation) != set(self.alphabet):
            raise InvalidBimonoid("letter interpretation must cover exactly the alphabet")
        if any(not 0 <= x < n for x in (*self.interpretation.values(), *self.accepting)):
            raise InvalidBimonoid("interpretation or accepting set outside the carrier")

    @classmethod
    def from_names(
        cls,
        elements: Sequence[str],
        unit: str,
        seq: Sequence[Sequence[str]],
        par: Sequence[Sequence[str]],
        interpretation: Mapping[str, str],
        accepting: Iterable[str],
        alphabet: Sequence[str] | None = None,
    ) -> Recogniser:
        pos = {name: k for k, name in enumerate(elements)}
        try:
            b = Bimonoid(
                tuple(elements),
                pos[unit],
                [[pos[x] for x in row] for row in seq],
                [[pos[x] for x in row] for row in par],
            )
            i = {a: pos[x] for a, x in interpretation.items()}
            f = {pos[x] for x in accepting}
        except KeyError as exc:
            raise InvalidBimonoid(f"unknown element {exc.args[0]!r}") from None
        return cls(b, tuple(alphabet if alphabet is not None else sorted(i)), i, frozenset(f))

    @property
    def elements(self) -> tuple[str, ...]:
        return self.bimonoid.elements

    @property
    def unit(self) -> int:
        return self.bimonoid.unit

    def __len__(self):
        return len(self.bimonoid)

    def name(self, x: int) -> str:
        return self.bimonoid.elements[x]

    def eval(self, u: Pomset) -> int:
        """The image of ``u`` under the free extension of the interpretation."""
        if u.kind == pm.EMPTY:
            return self.bimonoid.unit
        if u.kind == pm.LETTER:
            try:
                return self.interpretation[u.label]
            except KeyError:
                raise UnknownLetter(u.label) from None
        if u.kind == pm.HOLE:
            raise ValueError("cannot evaluate a context")
        values = [self.eval(p) for p in u.parts]
        op = self.bimonoid.seq if u.kind == SEQ else self.bimonoid.par
        return reduce(op, values)

    def accepts(self, u: Pomset) -> bool:
        return self.eval(u) in self.accepting

    def __contains__(self, u: Pomset) -> bool:
        return self.accepts(u)

    def restrict(self, keep: Sequence[int]) -> Recogniser:
        """Sub-recogniser on ``keep``, which must be closed under both operations."""
        pos = {x: k for k, x in enumerate(keep)}
        b = self.bimonoid
        sub = Bimonoid(
            tuple(b.elements[x] for x in keep),
            pos[b.unit],
            [[pos[b.seq(x, y)] for y in keep] for x in keep],
            [[pos[b.par(x, y)] for y in keep] for x in keep],
        )
        return Recogniser(
            sub,
            self.alphabet,
            {a: pos[x] for a, x in self.interpretation.items()},
            frozenset(pos[x] for x in self.accepting if x in pos),
        )


def _require_valid(r: Recogniser):
    report = validate_axioms(r.bimonoid)
    if not report.ok:
        v = report.violations[0]
        raise InvalidBimonoid(v.describe(r.elements) if v.law != RANGE else "table entry out of range")


# -- closures with witnesses ---------------------------------------------


def closure(
    unit: Hashable,
    letters: Mapping[str, Hashable],
    seq_op: Callable[[Any, Any], Hashable],
    par_op: Callable[[Any, Any], Hashable],
    limit: int | None = None,
) -> dict[Hashable, Pomset]:
    """Least set containing ``unit`` and the letter images, closed under both ops.

    Each element is paired with a witness pomset of minimal size; the result
    is ordered by witness (size, then print). Candidates of each size are
    built from already-found witnesses, so ties are broken among those.
    """
    found: dict[Hashable, Pomset] = {unit: pm.ONE}
    by_size: dict[int, list[Hashable]] = {0: [unit]}
    first = {}
    for a in sorted(letters):
        x = letters[a]
        if x not in found and x not in first:
            first[x] = pm.letter(a)
    if first:
        for x, w in sorted(first.items(), key=lambda kv: kv[1].key):
            found[x] = w
        by_size[1] = list(first)
    size = 2
    while size <= 2 * max(by_size):
        cands: dict[Hashable, Pomset] = {}
        for i in range(1, size):
            for x in by_size.get(i, ()):
                for y in by_size.get(size - i, ()):
                    for kind, op in ((SEQ, seq_op), (PAR, par_op)):
                        z = op(x, y)
                        if z in found:
                            continue
                        w = pm.compose(kind, found[x], found[y])
                        if z not in cands or w.key < cands[z].key:
                            cands[z] = w
        if cands:
            ordered = sorted(cands.items(), key=lambda kv: kv[1].key)
            for z, w in ordered:
                found[z] = w
            by_size[size] = [z for z, _ in ordered]
            if limit is not None and len(found) > limit:
                raise ClosureDiverged(f"closure exceeded {limit} elements")
        size += 1
    return found


def reachable(r: Recogniser) -> dict[int, Pomset]:
    """Reachable elements, each with a smallest pomset evaluating to it."""
    b = r.bimonoid
    return closure(b.unit, r.interpretation, b.seq, b.par)


@dataclass
class Equivalence:
    equal: bool
    counterexample: Pomset | None = None
    bounded: bool = False

    def __bool__(self):
        return self.equal


def equivalence(r1: Recogniser, r2: Recogniser) -> Equivalence:
    """Decide language equality through the reachable part of the product."""
    if set(r1.alphabet) != set(r2.alphabet):
        raise AlphabetMismatch(f"{sorted(r1.alphabet)} != {sorted(r2.alphabet)}")
    b1, b2 = r1.bimonoid, r2.bimonoid
    pairs = closure(
        (b1.unit, b2.unit),
        {a: (r1.interpretation[a], r2.interpretation[a]) for a in r1.alphabet},
        lambda x, y: (b1.seq(x[0], y[0]), b2.seq(x[1], y[1])),
        lambda x, y: (b1.par(x[0], y[0]), b2.par(x[1], y[1])),
    )
    for (m1, m2), w in pairs.items():
        if (m1 in r1.accepting) != (m2 in r2.accepting):
            return Equivalence(False, w)
    return Equivalence(True)


# -- minimisation ---------------------------------------------------------


def _refine(r: Recogniser, carrier: Sequence[int]) -> dict[int, int]:
    """Coarsest partition of ``carrier`` compatible with F and one-step contexts."""
    b = r.bimonoid
    block = {x: int(x in r.accepting) for x in carrier}
    while True:
        sigs = {
            x: (
                block[x],
                tuple(block[b.seq(m, x)] for m in carrier),
                tuple(block[b.seq(x, m)] for m in carrier),
                tuple(block[b.par(m, x)] for m in carrier),
            )
            for x in carrier
        }
        ids: dict[tuple, int] = {}
        new = {x: ids.setdefault(sigs[x], len(ids)) for x in carrier}
        if len(ids) == len(set(block.values())):
            return new
        block = new


def minimize(r: Recogniser) -> Recogniser:
    """Reachable quotient by the coarsest congruence saturating F."""
    _require_valid(r)
    carrier = list(reachable(r))
    carrier.sort()
    block = _refine(r, carrier)
    reps: dict[int, int] = {}
    for x in carrier:
        reps.setdefault(block[x], x)
    order = sorted(reps.values())
    pos = {reps[block[x]]: k for k, x in enumerate(order)}
    b = r.bimonoid

    def cls(x):
        return pos[reps[block[x]]]

    quotient = Bimonoid(
        tuple(b.elements[x] for x in order),
        cls(b.unit),
        [[cls(b.seq(x, y)) for y in order] for x in order],
        [[cls(b.par(x, y)) for y in order] for x in order],
    )
    return Recogniser(
        quotient,
        r.alphabet,
        {a: cls(x) for a, x in r.interpretation.items()},
        frozenset(cls(x) for x in order if x in r.accepting),
    )


@dataclass
class Minimality:
    minimal: bool
    unreachable: list[int] = field(default_factory=list)
    merged: tuple[int, int] | None = None

    def __bool__(self):
        return self.minimal


def is_minimal(r: Recogniser) -> Minimality:
    _require_valid(r)
    reach = reachable(r)
    missing = [x for x in range(len(r)) if x not in reach]
    if missing:
        return Minimality(False, unreachable=missing)
    block = _refine(r, list(range(len(r))))
    seen: dict[int, int] = {}
    for x in range(len(r)):
        if block[x] in seen:
            return Minimality(False, merged=(seen[block[x]], x))
        seen[block[x]] = x
    return Minimality(True)


# -- depth-nilpotency -----------------------------------------------------


@dataclass
class DepthReport:
    is_depth_nilpotent: bool
    conditions: dict[str, bool]
    zero: int | None
    strict_below: frozenset[tuple[int, int]]
    depth: dict[int, int]
    failure_witness: str | None = None

    @property
    def max_chain(self) -> int:
        return max(self.depth.values(), default=0)


def _generating_pairs(b: Bimonoid) -> set[tuple[int, int]]:
    n = len(b)
    S, P = b.seq_table, b.par_table
    # ideal[t] = {w . t . x}
    ideal = [set(S[S[:, t]].ravel().tolist()) for t in range(n)]
    pairs = set()
    for t in range(n):
        for z in ideal[t]:
            for v in range(n):
                p = int(P[v, z])
                if p != z:
                    for s in ideal[p]:
                        pairs.add((s, t))
    return pairs


def _transitive_closure(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    reach = np.zeros((n, n), dtype=bool)
    for s, t in pairs:
        reach[s, t] = True
    for k in range(n):
        reach |= reach[:, k : k + 1] & reach[k : k + 1, :]
    return reach


def depth_analysis(r: Recogniser) -> DepthReport:
    """Compute the strict nesting order, its chain lengths and the four conditions."""
    _require_valid(r)
    b = r.bimonoid
    n = len(b)
    names = r.elements
    generating = _generating_pairs(b)
    below = _transitive_closure(n, generating)
    failures = []

    cyclic = [s for s in range(n) if below[s, s]]
    cond_i = not cyclic
    if cyclic:
        direct = [s for s in cyclic if (s, s) in generating]
        s = (direct or cyclic)[0]
        failures.append(f"(i) {names[s]} ≺ {names[s]}")

    zero = None
    for z in range(n):
        if z not in r.accepting and all(b.par(s, z) == z for s in range(n)):
            zero = z
            break
    cond_ii = zero is not None
    if not cond_ii:
        failures.append("(ii) no absorbing non-accepting element for par")

    cond_iii = True
    for s in range(n):
        for t in range(n):
            if b.par(s, t) == t and s != b.unit and t != zero:
                cond_iii = False
                failures.append(f"(iii) {names[s]} | {names[t]} = {names[t]}")
                break
        if not cond_iii:
            break

    nonempty = _nonempty_images(r)
    cond_iv = b.unit not in nonempty
    if not cond_iv:
        failures.append(f"(iv) non-empty pomset {nonempty[b.unit]} evaluates to the unit")

    depth: dict[int, int] = {}
    if cond_i:
        succ = {s: [t for t in range(n) if below[s, t]] for s in range(n)}

        def d(s):
            if s not in depth:
                depth[s] = 1 + max((d(t) for t in succ[s]), default=0)
            return depth[s]

        for s in range(n):
            d(s)

    conditions = {"i": cond_i, "ii": cond_ii, "iii": cond_iii, "iv": cond_iv}
    ok = all(conditions.values())
    return DepthReport(
        ok,
        conditions,
        zero,
        frozenset((int(s), int(t)) for s, t in np.argwhere(below)),
        depth,
        None if ok else "; ".join(failures),
    )


def _nonempty_images(r: Recogniser) -> dict[int, Pomset]:
    """Elements that some non-empty pomset evaluates to, with witnesses."""
    b = r.bimonoid
    reach = reachable(r)
    found: dict[int, Pomset] = {}
    for a in sorted(r.interpretation):
        found.setdefault(r.interpretation[a], pm.letter(a))
    changed = True
    while changed:
        changed = False
        for x, wx in list(found.items()):
            for y, wy in reach.items():
                for z, w in (
                    (b.seq(x, y), pm.seq(wx, wy)),
                    (b.seq(y, x), pm.seq(wy, wx)),
                    (b.par(x, y), pm.par(wx, wy)),
                ):
                    if z not in found:
                        found[z] = w
                        changed = True
    return found


# -- JSON -----------------------------------------------------------------


def to_dict(r: Recogniser) -> dict:
    b = r.bimonoid
    names = b.elements
    return {
        "alphabet": list(r.alphabet),
        "elements": list(names),
        "unit": names[b.unit],
        "seq": [[names[x] for x in row] for row in b.seq_table.tolist()],
        "par": [[names[x] for x in row] for row in b.par_table.tolist()],
        "i": {a: names[r.interpretation[a]] for a in r.alphabet},
        "accepting": [names[x] for x in sorted(r.accepting)],
    }


def from_dict(data: Mapping) -> Recogniser:
    """Build and validate a recogniser; invalid tables raise :class:`InvalidBimonoid`."""
    try:
        r = Recogniser.from_names(
            data["elements"],
            data["unit"],
            data["seq"],
            data["par"],
            data["i"],
            data["accepting"],
            data["alphabet"],
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed recogniser document: {exc}") from None
    _require_valid(r)
    return r


def dumps(r: Recogniser) -> str:
    return json.dumps(to_dict(r), indent=2)


def loads(text: str) -> Recogniser:
    return from_dict(json.loads(text))


def load(path) -> Recogniser:
    with open(path) as fh:
        return from_dict(json.load(fh))


def save(r: Recogniser, path):
    with open(path, "w") as fh:
        fh.write(dumps(r) + "\n")
