"""Shrink a large model onto a small universe and check it still works.

A hand-built model of size 8 is checked, its small universe D* is built
from the free variables (plus witnesses for false nested universals), and
the relativized model over D* is re-evaluated.

Run:  python demos/relativization_demo.py
"""

from stratisat import Interpretation, build_universe, domain_bound, evaluate, normalize, parse, relativized_model
from stratisat.syntax import var0, var1, var2

psi = parse("""
sort0 x y z; sort1 X Y Z; sort2 A;
assert x in X & ~(y in X) & X in A & ~(Y in A)
     & (forall Z . Z in A -> (forall z . z in Z -> z in X)).
""")

(nc,) = normalize(psi)
x, y, X, Y, A = var0("x"), var0("y"), var1("X"), var1("Y"), var2("A")
M = Interpretation(
    8,
    {x: 0, y: 1},
    {X: {0, 2, 3, 6}, Y: {4, 5, 7}},
    {A: [{0}, {2, 3}, {6}, set(), {0, 2, 3, 6}]},
)
print("model of size", M.m, "satisfies the formula:", evaluate(M, psi))
print(M.to_json())

rep = build_universe(M, nc)
print("D* =", sorted(rep.dstar), "bound", domain_bound(nc))
print("  from individuals:", sorted(rep.base))
print("  distinguishing the sets:", sorted(rep.d0))
print("  size points:", sorted(rep.d1))
for w in rep.witnesses:
    print("  witness", w.to_json())

_, small = relativized_model(M, nc)
print("relativized model of size", small.m, "satisfies the formula:", evaluate(small, psi))
print(small.to_json())
