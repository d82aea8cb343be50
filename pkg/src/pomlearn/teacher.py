"""Minimally adequate teachers for the learner.

A teacher answers membership queries on pomsets and equivalence queries on
hypothesis recognisers, counting every query it receives. Caching repeated
membership queries is the learner's job.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

from . import pa as pa_mod
from . import pomset as pm
from . import recogniser as rc
from .errors import NotSaturatedWithin
from .pomset import Pomset
from .recogniser import Equivalence, Recogniser


class Teacher:
    """Base class; subclasses implement ``_member`` and ``_equivalent``."""

    bounded = False

    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = tuple(alphabet)
        self.membership_queries = 0
        self.equivalence_queries = 0

    def membership(self, u: Pomset) -> bool:
        self.membership_queries += 1
        return bool(self._member(u))

    def equivalence(self, hypothesis: Recogniser) -> Equivalence:
        self.equivalence_queries += 1
        return self._equivalent(hypothesis)

    def _member(self, u: Pomset) -> bool:
        raise NotImplementedError

    def _equivalent(self, hypothesis: Recogniser) -> Equivalence:
        raise NotImplementedError


class RecogniserTeacher(Teacher):
    def __init__(self, target: Recogniser):
        rc._require_valid(target)
        super().__init__(target.alphabet)
        self.target = target

    def _member(self, u):
        return self.target.accepts(u)

    def _equivalent(self, hypothesis):
        return rc.equivalence(self.target, hypothesis)


class PATeacher(RecogniserTeacher):
    """Answers membership from runs and equivalence via the run-relation bimonoid."""

    def __init__(self, automaton: pa_mod.PomsetAutomaton, bound: int = 6):
        report = pa_mod.check_saturated(automaton, bound, first_only=True)
        if not report.ok:
            raise NotSaturatedWithin(bound, report.witness)
        super().__init__(pa_mod.pa_to_recogniser(automaton, screen=False))
        self.automaton = automaton

    def _member(self, u):
        return self.automaton.accepts(u)


class BoundedTeacher(Teacher):
    """Black-box teacher whose equivalence answers are only sound up to ``bound`` letters."""

    bounded = True

    def __init__(self, member: Callable[[Pomset], bool], bound: int, alphabet: Sequence[str]):
        if bound < 0:
            raise ValueError("bound must be non-negative")
        super().__init__(alphabet)
        self.member = member
        self.bound = bound
        self._table: list[tuple[Pomset, bool]] | None = None

    def _member(self, u):
        return self.member(u)

    def _equivalent(self, hypothesis):
        if self._table is None:
            self._table = [(u, bool(self.member(u))) for u in pm.enumerate_pomsets(self.alphabet, self.bound)]
        for u, want in self._table:
            if hypothesis.accepts(u) != want:
                return Equivalence(False, u, bounded=True)
        return Equivalence(True, bounded=True)


def recogniser_teacher(r: Recogniser) -> RecogniserTeacher:
    return RecogniserTeacher(r)


def pa_teacher(a: pa_mod.PomsetAutomaton, bound: int = 6) -> PATeacher:
    return PATeacher(a, bound)


def bounded_teacher(f: Callable[[Pomset], bool], bound: int, alphabet: Sequence[str]) -> BoundedTeacher:
    return BoundedTeacher(f, bound, alphabet)
