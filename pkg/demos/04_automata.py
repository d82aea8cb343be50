"""Pomset automata: runs, saturation, fork-acyclicity and conversions."""

from importlib import resources

from pomlearn import pa, recogniser as rc
from pomlearn.pomset import enumerate_pomsets, parse

data = resources.files("pomlearn") / "data"
simple = pa.load(str(data / "simple_pa.json"))
anbn = pa.load(str(data / "problematic_pa.json"))

print(sorted(simple.run_relation(parse("b|c")).pairs))
print([str(u) for u in enumerate_pomsets("abc", 5) if simple.accepts(u)])

# a^n b^n: forks act as a call stack
print([str(u) for u in enumerate_pomsets("ab", 6) if anbn.accepts(u) and "|" not in str(u)])
report = pa.check_saturated(anbn, 4)
print(len(report.violations), "violations, first:", report.witness)
print(pa.is_fork_acyclic(anbn))

# saturated automata turn into recognisers and back
r = pa.pa_to_recogniser(simple)
print(r.elements)
loop = rc.load(str(data / "loop.json"))
back = pa.pa_to_recogniser(pa.recogniser_to_pa(loop))
print(rc.equivalence(back, loop).equal)

fa = pa.recogniser_to_fork_acyclic_pa(loop)
print(pa.is_fork_acyclic(fa), len(fa.gamma), "forks")
print(pa.to_dot(simple))
