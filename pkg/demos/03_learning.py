"""Learning a recogniser from membership and equivalence queries."""

from importlib import resources

from pomlearn import learner, recogniser as rc, teacher
from pomlearn.pomset import parse

data = resources.files("pomlearn") / "data"
target = rc.load(str(data / "loop.json"))

log = []
h, stats = learner.learn(teacher.recogniser_teacher(target), transcript=log)
print("\n".join(log[-12:]))
print(stats.line())
print("equivalent:", rc.equivalence(h, target).equal, "elements:", h.elements)
print("query envelope:", learner.query_bound(stats))

# the same language from a plain predicate; equivalence only checked up to 6 letters
def member(u):
    blocks = u.parts if u.kind == "seq" else (u,)
    return u.is_empty or all(str(x) == "a|b" for x in blocks)

h2, stats2 = learner.learn(teacher.bounded_teacher(member, 6, "ab"))
print(stats2.line(), "bounded" if stats2.bounded else "")
print(rc.equivalence(h2, target).equal)

# counterexample handling on a hand-made table
small = {parse("a"), parse("a.a"), parse("a|a")}
t = learner.ObservationTable(teacher.bounded_teacher(lambda u: u in small, 4, "a"), [parse("a")])
trace = []
print(t.handle_counterexample(parse("a|a|a.a"), trace=trace))
for z, c, out in trace:
    print(f"  {str(z):8} in {str(c):10} -> {out}")
