"""Active learning of pomset recognisers from an observation table.

Rows are indexed by pomsets ``S`` and columns by contexts ``E``; a cell
records whether ``e[s]`` is in the target language. The learner repairs
closedness and associativity defects, builds a hypothesis, makes it agree
with its own table, and then asks the teacher. Counterexamples are reduced to
a single new column by replacing subterms with row representatives.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Union

from . import pomset as pm
from . import recogniser as rc
from .errors import DefectPresent, NotClosed, TeacherInconsistent
from .pomset import HOLE_TERM, ONE, PAR, SEQ, Context, Pomset, Split
from .recogniser import Recogniser
from .teacher import Teacher

OPS = (SEQ, PAR)


@dataclass(frozen=True)
class Closedness:
    t: Pomset


@dataclass(frozen=True)
class Associativity:
    op: str
    s1: Pomset
    s2: Pomset
    s3: Pomset
    sl: Pomset
    sr: Pomset
    e: Context


@dataclass(frozen=True)
class Compatibility:
    s: Pomset
    e: Context


Defect = Union[Closedness, Associativity, Compatibility]


@dataclass
class LearnStats:
    membership_queries: int = 0
    equivalence_queries: int = 0
    max_counterexample_ops: int = 0
    final_carrier: int = 0
    alphabet_size: int = 0
    counterexamples: int = 0
    bounded: bool = False

    def line(self) -> str:
        return (
            f"n={self.final_carrier} k={self.alphabet_size} m={self.max_counterexample_ops} "
            f"mq={self.membership_queries} eq={self.equivalence_queries}"
        )


class ObservationTable:
    """Rows ``S``, columns ``E`` and a write-once membership cache.

    The cache is keyed by the plugged pomset, so a query is never repeated
    however many (row, column) pairs produce it.
    """

    def __init__(
        self,
        teacher: Teacher,
        rows: Iterable[Pomset] = (ONE,),
        columns: Iterable[Context] = (HOLE_TERM,),
        transcript: list[str] | None = None,
    ):
        self.teacher = teacher
        self.alphabet = teacher.alphabet
        self.transcript = transcript
        self.S: list[Pomset] = []
        self.decomposition: dict[Pomset, Split] = {}
        self.E: list[Context] = []
        self.cache: dict[Pomset, bool] = {}
        self._ext: dict[Pomset, Split | None] | None = None
        for s in sorted(set(rows) | {ONE}, key=lambda t: t.key):
            self.S.append(s)
        for s in self.S:
            split = pm.decompose(s)
            if split is not None:
                self.decomposition[s] = self._split_within(s) or split
        for e in columns:
            if e not in self.E:
                self.E.append(e)
        if HOLE_TERM not in self.E:
            self.E.insert(0, HOLE_TERM)

    def _split_within(self, s: Pomset) -> Split | None:
        for u, v in itertools.product(self.S, repeat=2):
            for op in OPS:
                if u != ONE and v != ONE and pm.compose(op, u, v) == s:
                    return Split(u, op, v)
        return None

    # -- queries -------------------------------------------------------

    def member(self, u: Pomset) -> bool:
        hit = self.cache.get(u)
        if hit is None:
            hit = self.teacher.membership(u)
            self.cache[u] = hit
            self._log(f"MQ {u} -> {int(hit)}")
        return hit

    def cell(self, t: Pomset, e: Context) -> bool:
        return self.member(pm.plug(e, t))

    def row(self, t: Pomset) -> tuple[bool, ...]:
        return tuple(self.cell(t, e) for e in self.E)

    def _log(self, line: str):
        if self.transcript is not None:
            self.transcript.append(line)

    # -- structure -----------------------------------------------------

    def ext_witnesses(self) -> dict[Pomset, Split | None]:
        """``ext(S)`` in (size, print) order, each with one way of building it."""
        if self._ext is None:
            found: dict[Pomset, Split | None] = {pm.letter(a): None for a in self.alphabet}
            for u, v in itertools.product(self.S, repeat=2):
                for op in OPS:
                    t = pm.compose(op, u, v)
                    if t not in found:
                        found[t] = Split(u, op, v)
            self._ext = dict(sorted(found.items(), key=lambda kv: kv[0].key))
        return self._ext

    def ext(self) -> list[Pomset]:
        return list(self.ext_witnesses())

    def representative(self, t: Pomset) -> Pomset | None:
        """The member of ``S`` whose row equals ``row(t)``, if any."""
        r = self.row(t)
        for s in self.S:
            if self.row(s) == r:
                return s
        return None

    def is_sharp(self) -> bool:
        rows = [self.row(s) for s in self.S]
        return len(set(rows)) == len(rows)

    def add_row(self, t: Pomset):
        if t in self.S:
            raise ValueError(f"{t} is already a row")
        split = self.ext_witnesses().get(t)
        if split is not None and split.left != ONE and split.right != ONE:
            self.decomposition[t] = split
        elif pm.decompose(t) is not None:
            self.decomposition[t] = self._split_within(t) or pm.decompose(t)
        self.S.append(t)
        self._ext = None
        self._log(f"ADD-ROW {t}")

    def add_column(self, e: Context):
        if not isinstance(e, Context):
            raise TeacherInconsistent(f"{e} is not a context")
        if e in self.E:
            raise TeacherInconsistent(f"column {e} is already present")
        self.E.append(e)
        self._log(f"ADD-COL {e}")

    # -- defects -------------------------------------------------------

    def closedness_defects(self) -> list[Closedness]:
        rows = {self.row(s) for s in self.S}
        return [Closedness(t) for t in self.ext() if self.row(t) not in rows]

    def find_closedness_defect(self) -> Closedness | None:
        rows = {self.row(s) for s in self.S}
        for t in self.ext():
            if self.row(t) not in rows:
                return Closedness(t)
        return None

    def _associativity(self, op: str, first: bool) -> list[Associativity]:
        out = []
        members = sorted(self.S, key=lambda t: t.key)
        for s1, s2, s3 in itertools.product(members, repeat=3):
            sl = self.representative(pm.compose(op, s1, s2))
            sr = self.representative(pm.compose(op, s2, s3))
            if sl is None or sr is None:
                raise NotClosed(f"no row matches {pm.compose(op, s1, s2) if sl is None else pm.compose(op, s2, s3)}")
            left, right = pm.compose(op, sl, s3), pm.compose(op, s1, sr)
            for e in self.E:
                if self.cell(left, e) != self.cell(right, e):
                    out.append(Associativity(op, s1, s2, s3, sl, sr, e))
                    if first:
                        return out
                    break
        return out

    def associativity_defects(self, op: str) -> list[Associativity]:
        return self._associativity(op, first=False)

    def find_associativity_defect(self, op: str) -> Associativity | None:
        found = self._associativity(op, first=True)
        return found[0] if found else None

    def fix_associativity(self, d: Associativity) -> Context:
        """Add the column that tells ``s_l`` from ``s1 op s2`` or ``s_r`` from ``s2 op s3``."""
        b = self.member(pm.plug(d.e, pm.compose(d.op, pm.compose(d.op, d.s1, d.s2), d.s3)))
        if self.cell(pm.compose(d.op, d.sl, d.s3), d.e) != b:
            new = pm.plug(d.e, pm.compose(d.op, HOLE_TERM, d.s3))
        else:
            new = pm.plug(d.e, pm.compose(d.op, d.s1, HOLE_TERM))
        self.add_column(new)
        return new

    def build_hypothesis(self) -> Recogniser:
        if not self.is_sharp():
            raise DefectPresent("table is not sharp")
        if (d := self.find_closedness_defect()) is not None:
            raise DefectPresent(f"table is not closed: {d.t}")
        index = {self.row(s): k for k, s in enumerate(self.S)}

        def table(op):
            return [[index[self.row(pm.compose(op, u, v))] for v in self.S] for u in self.S]

        b = rc.Bimonoid(tuple(str(s) for s in self.S), self.S.index(ONE), table(SEQ), table(PAR))
        report = rc.validate_axioms(b)
        if not report.ok:
            raise DefectPresent("table is not associative: " + report.violations[0].describe(b.elements))
        h = Recogniser(
            b,
            self.alphabet,
            {a: index[self.row(pm.letter(a))] for a in self.alphabet},
            frozenset(k for k, s in enumerate(self.S) if self.cell(s, HOLE_TERM)),
        )
        return h

    def compatibility_defects(self, h: Recogniser, first: bool = False) -> list[Compatibility]:
        out = []
        for s in self.S:
            for e in self.E:
                if h.accepts(pm.plug(e, s)) != self.cell(s, e):
                    assert e != HOLE_TERM, "hypothesis misclassifies a row label"
                    out.append(Compatibility(s, e))
                    if first:
                        return out
        return out

    def find_compatibility_defect(self, h: Recogniser) -> Compatibility | None:
        found = self.compatibility_defects(h, first=True)
        return found[0] if found else None

    # -- counterexamples -----------------------------------------------

    def handle_counterexample(
        self,
        z: Pomset,
        c: Context = HOLE_TERM,
        split: Callable[[Pomset], Split | None] = pm.decompose,
        trace: list[tuple[Pomset, Context, Pomset]] | None = None,
    ) -> Pomset:
        """Return a member of ``S`` that may replace ``z`` in ``c``, or a new column.

        ``c[z]`` must be misclassified by the current hypothesis. ``trace``
        collects ``(z, c, result)`` for every call, innermost first.
        """
        ext = self.ext_witnesses()
        if z in ext or z in self.S:
            s = self.representative(z)
            if s is None:
                raise NotClosed(f"no row matches {z}")
            out = s if self.member(pm.plug(c, s)) == self.member(pm.plug(c, z)) else c
        else:
            parts = split(z)
            if parts is None:
                raise ValueError(f"cannot decompose {z}")
            u1, op, u2 = parts
            u1 = self.handle_counterexample(u1, pm.plug(c, pm.compose(op, HOLE_TERM, u2)), split, trace)
            if u1 not in self.S:
                out = u1
            else:
                u2 = self.handle_counterexample(u2, pm.plug(c, pm.compose(op, u1, HOLE_TERM)), split, trace)
                if u2 not in self.S:
                    out = u2
                else:
                    out = self.handle_counterexample(pm.compose(op, u1, u2), c, split, trace)
        if trace is not None:
            trace.append((z, c, out))
        return out

    def process_counterexample(self, z: Pomset) -> Context:
        """Run counterexample handling from the top and add the resulting column."""
        e = self.handle_counterexample(z)
        if not isinstance(e, Context):
            raise TeacherInconsistent(f"counterexample {z} reduced to the row {e}")
        self.add_column(e)
        return e


Observer = Callable[[str, ObservationTable, Recogniser | None], None]


def make_closed_and_associative(table: ObservationTable):
    while True:
        d = table.find_closedness_defect()
        if d is not None:
            table.add_row(d.t)
            continue
        for op in OPS:
            a = table.find_associativity_defect(op)
            if a is not None:
                table.fix_associativity(a)
                break
        else:
            return


def learn(
    teacher: Teacher,
    transcript: list[str] | None = None,
    observer: Observer | None = None,
    max_rounds: int = 10_000,
) -> tuple[Recogniser, LearnStats]:
    """Learn a minimal recogniser for the teacher's language.

    ``observer`` is called with ``("boundary", table, None)`` whenever the
    table is closed and associative, and with ``("hypothesis", table, h)``
    for every hypothesis submitted to the teacher.
    """
    table = ObservationTable(teacher, transcript=transcript)
    stats = LearnStats(alphabet_size=len(teacher.alphabet), bounded=teacher.bounded)
    for _ in range(max_rounds):
        while True:
            make_closed_and_associative(table)
            if observer:
                observer("boundary", table, None)
            h = table.build_hypothesis()
            d = table.find_compatibility_defect(h)
            if d is None:
                break
            z = pm.plug(d.e, d.s)
            stats.max_counterexample_ops = max(stats.max_counterexample_ops, z.operations)
            stats.counterexamples += 1
            table.process_counterexample(z)
        table._log(f"HYP {len(h)}")
        if observer:
            observer("hypothesis", table, h)
        answer = teacher.equivalence(h)
        n = teacher.equivalence_queries
        if answer.equal:
            table._log(f"EQ #{n} -> ok")
            stats.membership_queries = teacher.membership_queries
            stats.equivalence_queries = teacher.equivalence_queries
            stats.final_carrier = len(h)
            stats.bounded = stats.bounded or answer.bounded
            return h, stats
        z = answer.counterexample
        table._log(f"EQ #{n} -> cex {z}")
        if h.accepts(z) == table.member(z):
            raise TeacherInconsistent(f"counterexample {z} is classified correctly by the hypothesis")
        stats.max_counterexample_ops = max(stats.max_counterexample_ops, z.operations)
        stats.counterexamples += 1
        table.process_counterexample(z)
    raise TeacherInconsistent(f"no correct hypothesis after {max_rounds} equivalence queries")


# Frozen constant of the membership-query envelope C * (n^3 + m n + k n).
QUERY_BOUND_CONSTANT = 6


def query_bound(stats: LearnStats) -> int:
    n, m, k = stats.final_carrier, stats.max_counterexample_ops, stats.alphabet_size
    return QUERY_BOUND_CONSTANT * (n**3 + m * n + k * n)
