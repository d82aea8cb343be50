"""Pomset automata: runs, saturation, fork-acyclicity and conversions.

A run relation is stored as a tuple of successor bitmasks, one per state:
bit ``j`` of ``rows[i]`` is set when state ``i`` can read the pomset and end
in state ``j``.

Fork threads may read the empty pomset. A thread that reads ``1`` must still
start in a state that can finish without input, so ``q`` may fork into
``{r, s}``, run ``u`` on ``r`` and nothing on ``s``, and thereby read just
``u``. This is what lets a finite automaton simulate a call stack.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from . import pomset as pm
from . import recogniser as rc
from .errors import (
    ClosureDiverged,
    FormatError,
    InvalidBimonoid,
    NotDepthNilpotent,
    NotSaturatedWithin,
    UnknownLetter,
)
from .pomset import PAR, SEQ, Pomset

Rows = tuple[int, ...]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _compose(x: Rows, y: Rows) -> Rows:
    out = []
    for row in x:
        acc = 0
        for j in _bits(row):
            acc |= y[j]
        out.append(acc)
    return tuple(out)


def _union(x: Rows, y: Rows) -> Rows:
    return tuple(a | b for a, b in zip(x, y))


@dataclass(frozen=True)
class RunRelation:
    """The pairs of states connected by a run on ``pomset``."""

    automaton: PomsetAutomaton = field(repr=False, compare=False)
    pomset: Pomset
    rows: Rows

    @property
    def pairs(self) -> set[tuple[str, str]]:
        names = self.automaton.states
        return {(names[i], names[j]) for i, row in enumerate(self.rows) for j in _bits(row)}

    def __contains__(self, pair: tuple[str, str]) -> bool:
        q, r = (self.automaton.index(s) for s in pair)
        return bool(self.rows[q] >> r & 1)

    def __len__(self):
        return sum(row.bit_count() for row in self.rows)


class PomsetAutomaton:
    """A finite pomset automaton.

    ``delta`` maps ``(state, letter)`` to a set of states and ``gamma`` maps
    ``(state, fork)`` to a set of states, where ``fork`` is a multiset of at
    least two states given as any sequence. States are referred to by name.
    """

    def __init__(
        self,
        states: Sequence[str],
        alphabet: Sequence[str],
        initial: Iterable[str],
        accepting: Iterable[str],
        delta: Mapping[tuple[str, str], Iterable[str]],
        gamma: Mapping[tuple[str, Sequence[str]], Iterable[str]],
    ):
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        if len(set(self.states)) != len(self.states):
            raise FormatError("duplicate state names")
        self._pos = {s: k for k, s in enumerate(self.states)}
        ix = self.index
        self.initial = frozenset(ix(q) for q in initial)
        self.accepting = frozenset(ix(q) for q in accepting)
        self.delta: dict[tuple[int, str], frozenset[int]] = {}
        for (q, a), targets in delta.items():
            if a not in self.alphabet:
                raise FormatError(f"letter {a!r} is not in the alphabet")
            ts = frozenset(ix(t) for t in targets)
            if ts:
                key = (ix(q), a)
                self.delta[key] = self.delta.get(key, frozenset()) | ts
        self.gamma: dict[tuple[int, tuple[int, ...]], frozenset[int]] = {}
        for (q, fork), targets in gamma.items():
            slots = tuple(sorted(ix(r) for r in fork))
            if len(slots) < 2:
                raise FormatError(f"fork from {q!r} must launch at least two threads")
            ts = frozenset(ix(t) for t in targets)
            if ts:
                key = (ix(q), slots)
                self.gamma[key] = self.gamma.get(key, frozenset()) | ts
        self._fmask = sum(1 << f for f in self.accepting)
        self._memo: dict[Pomset, Rows] = {}
        self._unit: Rows | None = None

    def index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise FormatError(f"unknown state {name!r}") from None

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return f"PomsetAutomaton({len(self.states)} states, {len(self.delta)} delta, {len(self.gamma)} gamma)"

    # -- runs ----------------------------------------------------------

    def _finishers(self, x: Rows) -> int:
        """States that can reach an accepting state under ``x``."""
        return sum(1 << q for q, row in enumerate(x) if row & self._fmask)

    def _forks(self, slot_ok) -> Rows:
        rows = [0] * len(self.states)
        for (q, slots), targets in self.gamma.items():
            if slot_ok(slots):
                for t in targets:
                    rows[q] |= 1 << t
        return tuple(rows)

    def _unit_rows(self) -> Rows:
        if self._unit is None:
            x = tuple(1 << q for q in range(len(self.states)))
            while True:
                fin = self._finishers(x)
                forks = self._forks(lambda slots: all(fin >> r & 1 for r in slots))
                new = _union(_union(x, _compose(x, x)), forks)
                if new == x:
                    break
                x = new
            self._unit = x
        return self._unit

    def _rows(self, u: Pomset) -> Rows:
        if u.kind == pm.EMPTY:
            return self._unit_rows()
        hit = self._memo.get(u)
        if hit is not None:
            return hit
        n = len(self.states)
        if u.kind == pm.LETTER:
            if u.label not in self.alphabet:
                raise UnknownLetter(u.label)
            base = [0] * n
            for (q, a), targets in self.delta.items():
                if a == u.label:
                    for t in targets:
                        base[q] |= 1 << t
            x = tuple(base)
        elif u.kind == SEQ:
            x = (0,) * n
            parts = u.parts
            for i in range(1, len(parts)):
                x = _union(x, _compose(self._rows(pm.seq(*parts[:i])), self._rows(pm.seq(*parts[i:]))))
        elif u.kind == PAR:
            x = self._split_forks(u)
        else:
            raise ValueError("cannot run an automaton on a context")
        one = self._unit_rows()
        unit_fin = self._finishers(one)
        while True:
            fin = self._finishers(x)

            def padded(slots):
                # one thread reads all of u, the others read 1
                for j, r in enumerate(slots):
                    if fin >> r & 1 and all(unit_fin >> s & 1 for k, s in enumerate(slots) if k != j):
                        return True
                return False

            new = _union(_union(x, _compose(one, x)), _union(_compose(x, one), self._forks(padded)))
            if new == x:
                break
            x = new
        self._memo[u] = x
        return x

    def _split_forks(self, u: Pomset) -> Rows:
        """Fork runs on ``u`` that hand its parallel components to two or more threads."""
        comps = Counter(u.parts)
        distinct = sorted(comps, key=lambda t: t.key)
        unit_fin = self._finishers(self._unit_rows())
        rows = [0] * len(self.states)
        for (q, slots), targets in self.gamma.items():
            k = len(slots)
            choices = [list(_compositions(comps[c], k)) for c in distinct]
            for assignment in itertools.product(*choices):
                blocks = [[] for _ in range(k)]
                for c, counts in zip(distinct, assignment):
                    for j, cnt in enumerate(counts):
                        blocks[j].extend([c] * cnt)
                if sum(1 for b in blocks if b) < 2:
                    continue
                ok = True
                for r, block in zip(slots, blocks):
                    fin = self._finishers(self._rows(pm.par(*block))) if block else unit_fin
                    if not fin >> r & 1:
                        ok = False
                        break
                if ok:
                    for t in targets:
                        rows[q] |= 1 << t
                    break
        return tuple(rows)

    def run_relation(self, u: Pomset) -> RunRelation:
        return RunRelation(self, u, self._rows(u))

    def accepts(self, u: Pomset) -> bool:
        rows = self._rows(u)
        return any(rows[q] & self._fmask for q in self.initial)

    def __contains__(self, u: Pomset) -> bool:
        return self.accepts(u)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def run_relation(a: PomsetAutomaton, u: Pomset) -> RunRelation:
    return a.run_relation(u)


def accepts(a: PomsetAutomaton, u: Pomset) -> bool:
    return a.accepts(u)


# -- saturation -----------------------------------------------------------


@dataclass(frozen=True)
class SaturationViolation:
    source: str
    left: Pomset
    right: Pomset
    op: str
    target: str

    def __str__(self):
        sym = "." if self.op == SEQ else "|"
        return f"{self.source} -[({self.left}){sym}({self.right})]-> {self.target} has no factorised run"


@dataclass
class SaturationReport:
    """Outcome of a bounded saturation screen.

    ``ok`` only means no violation exists among pomsets within ``bound``
    letters; saturation itself quantifies over all pomsets.
    """

    bound: int
    violations: list[SaturationViolation]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def witness(self) -> SaturationViolation | None:
        return self.violations[0] if self.violations else None

    def __bool__(self):
        return self.ok


def check_saturated(a: PomsetAutomaton, bound: int = 6, first_only: bool = False) -> SaturationReport:
    """Check both factorisation conditions for all ``u, v != 1`` within ``bound`` letters.

    Pairs are visited by combined size, then by ``u``, then ``v``; violations
    are listed in that order, one per offending source/target pair.
    """
    if bound < 2:
        raise ValueError("saturation bound must be at least 2")
    by_size: dict[int, list[Pomset]] = {}
    for u in pm.enumerate_pomsets(a.alphabet, bound - 1):
        by_size.setdefault(u.size, []).append(u)
    violations: list[SaturationViolation] = []
    names = a.states
    binary = [(q, slots, ts) for (q, slots), ts in a.gamma.items() if len(slots) == 2]
    for total in range(2, bound + 1):
        for su in range(1, total):
            for u in by_size.get(su, ()):
                ru = a._rows(u)
                fu = a._finishers(ru)
                for v in by_size.get(total - su, ()):
                    rv = a._rows(v)
                    whole = a._rows(pm.seq(u, v))
                    split = _compose(ru, rv)
                    for q, (w, s) in enumerate(zip(whole, split)):
                        for t in _bits(w & ~s):
                            violations.append(SaturationViolation(names[q], u, v, SEQ, names[t]))
                    if u.key <= v.key:
                        whole = a._rows(pm.par(u, v))
                        fv = a._finishers(rv)
                        allowed = [0] * len(names)
                        for q, (r, s), ts in binary:
                            if (fu >> r & 1 and fv >> s & 1) or (fu >> s & 1 and fv >> r & 1):
                                for t in ts:
                                    allowed[q] |= 1 << t
                        for q, (w, s) in enumerate(zip(whole, allowed)):
                            for t in _bits(w & ~s):
                                violations.append(SaturationViolation(names[q], u, v, PAR, names[t]))
                    if first_only and violations:
                        return SaturationReport(bound, violations)
    return SaturationReport(bound, violations)


# -- support preorder -----------------------------------------------------


def support_preorder(a: PomsetAutomaton) -> set[tuple[str, str]]:
    """Pairs ``(x, y)`` with ``x`` supporting ``y``: runs from ``y`` may depend on ``x``."""
    n = len(a)
    below = [[i == j for j in range(n)] for i in range(n)]
    for (q, _), targets in a.delta.items():
        for t in targets:
            below[t][q] = True
    for (q, slots), targets in a.gamma.items():
        for t in targets:
            below[t][q] = True
        for r in slots:
            below[r][q] = True
    for k in range(n):
        for i in range(n):
            if below[i][k]:
                row_k = below[k]
                row_i = below[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {(a.states[i], a.states[j]) for i in range(n) for j in range(n) if below[i][j]}


@dataclass
class ForkAcyclicity:
    acyclic: bool
    witness: tuple[str, str, tuple[str, ...]] | None = None

    def __bool__(self):
        return self.acyclic


def is_fork_acyclic(a: PomsetAutomaton) -> ForkAcyclicity:
    order = support_preorder(a)
    for (q, slots), _ in sorted(a.gamma.items()):
        for r in slots:
            if (a.states[q], a.states[r]) in order:
                return ForkAcyclicity(False, (a.states[q], a.states[r], tuple(a.states[s] for s in slots)))
    return ForkAcyclicity(True)


# -- conversions ----------------------------------------------------------


def recogniser_to_pa(r: rc.Recogniser, depth: Mapping[int, int] | None = None) -> PomsetAutomaton:
    """States are carrier elements; a state accepts exactly the pomsets mapped to it.

    With ``depth`` given, forks are kept only into elements of strictly
    smaller depth than the forking state.
    """
    rc._require_valid(r)
    b = r.bimonoid
    n = len(b)
    names = b.elements
    delta = {}
    for a in r.alphabet:
        ia = r.interpretation[a]
        for q in range(n):
            targets = [names[t] for t in range(n) if b.seq(ia, t) == q]
            if targets:
                delta[(names[q], a)] = targets
    gamma = {}
    for x, y in itertools.combinations_with_replacement(range(n), 2):
        xy = b.par(x, y)
        for q in range(n):
            if depth is not None and not (depth[x] < depth[q] and depth[y] < depth[q]):
                continue
            targets = [names[t] for t in range(n) if b.seq(xy, t) == q]
            if targets:
                gamma[(names[q], (names[x], names[y]))] = targets
    return PomsetAutomaton(
        names,
        r.alphabet,
        [names[f] for f in sorted(r.accepting)],
        [names[b.unit]],
        delta,
        gamma,
    )


def recogniser_to_fork_acyclic_pa(r: rc.Recogniser) -> PomsetAutomaton:
    report = rc.depth_analysis(r)
    if not report.is_depth_nilpotent:
        raise NotDepthNilpotent(report)
    return recogniser_to_pa(r, depth=report.depth)


DEAD = "dead"


def with_dead_state(a: PomsetAutomaton) -> PomsetAutomaton:
    """Add a transitionless state that is neither initial nor accepting."""
    name = DEAD
    while name in a.states:
        name = "_" + name
    return PomsetAutomaton(
        (*a.states, name),
        a.alphabet,
        [a.states[q] for q in sorted(a.initial)],
        [a.states[q] for q in sorted(a.accepting)],
        {(a.states[q], x): [a.states[t] for t in ts] for (q, x), ts in a.delta.items()},
        {(a.states[q], tuple(a.states[s] for s in slots)): [a.states[t] for t in ts] for (q, slots), ts in a.gamma.items()},
    )


def pa_to_recogniser(
    a: PomsetAutomaton,
    bound: int = 6,
    screen: bool = True,
    limit: int = 1 << 16,
) -> rc.Recogniser:
    """Build the bimonoid of run relations of a saturated automaton.

    Saturation is screened up to ``bound`` letters; composition of elements is
    relation composition and parallel composition goes through binary forks,
    both of which are only correct for saturated automata.
    """
    if screen:
        report = check_saturated(a, bound, first_only=True)
        if not report.ok:
            raise NotSaturatedWithin(bound, report.witness)
    aug = with_dead_state(a)
    one = aug._unit_rows()
    binary = [(q, slots, ts) for (q, slots), ts in aug.gamma.items() if len(slots) == 2]

    def par_op(x: Rows, y: Rows) -> Rows:
        if x == one:
            return y
        if y == one:
            return x
        fx, fy = aug._finishers(x), aug._finishers(y)
        rows = [0] * len(aug)
        for q, (r, s), ts in binary:
            if (fx >> r & 1 and fy >> s & 1) or (fx >> s & 1 and fy >> r & 1):
                for t in ts:
                    rows[q] |= 1 << t
        return tuple(rows)

    letters = {x: aug._rows(pm.letter(x)) for x in aug.alphabet}
    cap = min(limit, 2 ** (len(aug) ** 2))
    found = rc.closure(one, letters, _compose, par_op, limit=cap)
    elements = list(found)
    pos = {x: k for k, x in enumerate(elements)}
    names = [str(found[x]) for x in elements]
    accepting = [
        k for k, x in enumerate(elements) if any(x[q] & aug._fmask for q in aug.initial)
    ]
    bim = rc.Bimonoid(
        tuple(names),
        0,
        [[pos[_compose(x, y)] for y in elements] for x in elements],
        [[pos[par_op(x, y)] for y in elements] for x in elements],
    )
    out = rc.Recogniser(bim, a.alphabet, {x: pos[letters[x]] for x in a.alphabet}, frozenset(accepting))
    report = rc.validate_axioms(bim)
    if not report.ok:
        raise InvalidBimonoid(
            "run relations do not form a bimonoid (automaton not saturated): "
            + report.violations[0].describe(names)
        )
    return out


# -- serialisation --------------------------------------------------------


def to_dict(a: PomsetAutomaton) -> dict:
    s = a.states
    return {
        "alphabet": list(a.alphabet),
        "states": list(s),
        "initial": [s[q] for q in sorted(a.initial)],
        "accepting": [s[q] for q in sorted(a.accepting)],
        "delta": [
            {"from": s[q], "letter": x, "to": [s[t] for t in sorted(ts)]}
            for (q, x), ts in sorted(a.delta.items())
        ],
        "gamma": [
            {"from": s[q], "fork": sorted(s[r] for r in slots), "to": [s[t] for t in sorted(ts)]}
            for (q, slots), ts in sorted(a.gamma.items())
        ],
    }


def from_dict(data: Mapping) -> PomsetAutomaton:
    try:
        return PomsetAutomaton(
            data["states"],
            data["alphabet"],
            data["initial"],
            data["accepting"],
            {(d["from"], d["letter"]): d["to"] for d in data.get("delta", [])},
            {(g["from"], tuple(g["fork"])): g["to"] for g in data.get("gamma", [])},
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed automaton document: {exc}") from None


def dumps(a: PomsetAutomaton) -> str:
    return json.dumps(to_dict(a), indent=2)


def loads(text: str) -> PomsetAutomaton:
    return from_dict(json.loads(text))


def load(path) -> PomsetAutomaton:
    with open(path) as fh:
        return from_dict(json.load(fh))


def save(a: PomsetAutomaton, path):
    with open(path, "w") as fh:
        fh.write(dumps(a) + "\n")


def to_dot(a: PomsetAutomaton) -> str:
    """Graphviz source; each fork is drawn as a small hyperedge node."""

    def q(s):
        return '"{}"'.format(s.replace('"', r"\""))

    lines = ["digraph pa {", "  rankdir=LR;"]
    for k, s in enumerate(a.states):
        shape = "doublecircle" if k in a.accepting else "circle"
        lines.append(f"  {q(s)} [shape={shape}];")
        if k in a.initial:
            lines.append(f'  {q("init_" + s)} [shape=point, style=invis];')
            lines.append(f'  {q("init_" + s)} -> {q(s)};')
    for (src, x), ts in sorted(a.delta.items()):
        for t in sorted(ts):
            lines.append(f"  {q(a.states[src])} -> {q(a.states[t])} [label={q(x)}];")
    for n, ((src, slots), ts) in enumerate(sorted(a.gamma.items())):
        fork = q(f"fork{n}")
        lines.append(f'  {fork} [shape=box, label="fork", style=rounded];')
        lines.append(f"  {q(a.states[src])} -> {fork} [arrowhead=none];")
        for r in slots:
            lines.append(f"  {fork} -> {q(a.states[r])} [style=bold];")
        for t in sorted(ts):
            lines.append(f"  {fork} -> {q(a.states[t])} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
