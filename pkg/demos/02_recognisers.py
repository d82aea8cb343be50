"""Two small recognisers: iterated a|b, and a recursive fork language."""

from importlib import resources

from pomlearn import recogniser as rc
from pomlearn.pomset import enumerate_pomsets, parse

data = resources.files("pomlearn") / "data"
loop = rc.load(str(data / "loop.json"))
nested = rc.load(str(data / "nested.json"))

print(loop.elements)
print(loop.bimonoid.seq_table)        # row = left operand
print(rc.validate_axioms(loop.bimonoid).ok)

for t in ["1", "a|b", "(a|b).(a|b)", "a.b"]:
    u = parse(t)
    print(f"{t:12} -> {loop.name(loop.eval(u)):5} accepted={loop.accepts(u)}")

# nested: b, or a followed by two members in parallel
words = [str(u) for u in enumerate_pomsets("ab", 7) if nested.accepts(u)]
print(words)

# smallest pomset telling the two languages apart
print(rc.equivalence(loop, nested).counterexample)

# witnesses for every element, and the depth structure
print({loop.name(x): str(w) for x, w in rc.reachable(loop).items()})
d = rc.depth_analysis(loop)
print({loop.name(x): v for x, v in d.depth.items()})
print(rc.depth_analysis(nested).failure_witness)
