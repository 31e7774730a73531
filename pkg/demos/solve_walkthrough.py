"""Walk a formula through the decision procedure step by step.

Run:  python demos/solve_walkthrough.py
"""

from stratisat import check_fragment, decide, domain_bound, normalize, parse

TEXT = """
sort0 x z; sort1 X Z; sort2 A;
assert (forall Z . Z in A <-> (forall z . z in Z -> z in X))
     & x in X & ~({x} in A).
"""

psi = parse(TEXT)
print("formula:", psi)

# Every nested universal must be linked to its set variables.
report = check_fragment(psi)
print("fragment:", report.verdict)
for ob in report.obligations:
    print("  obligation", ob.method, ob.verdict)

# The formula is split into conjunctions, each with its own size bound.
for i, nc in enumerate(normalize(psi)):
    print(f"conjunction {i}: bound {domain_bound(nc)}")
    print("   ", nc)

# {x} is a subset of X, so a powerset of X cannot miss it.
r = decide(psi)
print("result:", r.status)

# Dropping the last conjunct makes it satisfiable.
r = decide(parse(TEXT.replace("& ~({x} in A)", "")))
print("without the last conjunct:", r.status, "at m =", r.m)
print("model:", r.model.to_json())
