"""Building, printing and enumerating series-parallel pomsets."""

from pomlearn import pomset as pm

a, b, c = pm.letter("a"), pm.letter("b"), pm.letter("c")

# a then (b and c in parallel)
u = pm.seq(a, pm.par(c, b))
print(u)                              # a.(b|c)
print(u == pm.parse("a.(c|b)"))       # parallel parts are unordered

# contexts have one hole, printed _
ctx = pm.parse("a.(_|b)")
print(pm.plug(ctx, b))                # a.(b|b)
print(pm.plug(ctx, pm.ONE))           # the empty pomset vanishes: a.b

# splitting a term into two halves
print(pm.decompose(pm.parse("a|a|a.a")))

# everything up to three letters over {a, b}
terms = list(pm.enumerate_pomsets("ab", 3))
print(len(terms), "pomsets;", " ".join(str(t) for t in terms[:12]), "...")
