"""Three ways to say A = X1 (x) ... (x) Xn, and what they cost.

The unordered Cartesian product collects every set that picks exactly one
element from each factor.  Enumerating the choice variables gives a
formula linear in n; splitting on which choices coincide gives one
disjunct per set partition of {1..n}, so the length grows with the Bell
numbers.

Run:  python demos/product_encodings.py
"""

from stratisat import build_ucp_enum, build_ucp_partition, decide, length_report, parse, ucp_oracle
from stratisat.encoders import ucp_variables

print("n  bell  len_enum  len_partition")
for n, b, le, lp in length_report(6):
    print(f"{n}  {b:4}  {le:8}  {lp:13}")

A, (X1, X2) = ucp_variables(2)
pin = parse("sort0 a b c; sort1 X1 X2; assert {a, b} = X1 & {b, c} = X2 & ~(a = b) & ~(b = c) & ~(a = c).")
for build in (build_ucp_enum, build_ucp_partition):
    r = decide(build(A, X1, X2) & pin)
    M = r.model
    got = sorted(sorted(s) for s in M.value(A))
    ok = M.value(A) == ucp_oracle([M.value(X1), M.value(X2)])
    print(f"{build.__name__}: X1={sorted(M.value(X1))} X2={sorted(M.value(X2))} A={got} matches: {ok}")
