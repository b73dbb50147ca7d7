"""The suspension of RP^2 at the prime 2, with explicit size bounds.

    python3 demos/sigma_rp2.py
"""
from simploc import BoundConfig, corpus_path, pipeline, read_sset
from simploc.bounds import final_bound
from simploc.homology import invariants

X = read_sset(corpus_path("sigma-rp2.sset"))
print("input counts:", X.counts())

# No k-invariants are supplied, so only the Hurewicz stage is built and d is
# treated as 2: the output matches X in Z_(2)-homology through degree 4.
res = pipeline(X, 2, bootstrap=True)
for line in res.profile.lines():
    print(" ", line)
print("pi_2 =", res.stages[0].group)
print("pruned output counts:", res.Y.counts(), "kept top generators:", res.pruned.T)
for v in res.verdicts:
    print(f"  {v.step}: {v.status} {v.detail}")

inv = invariants(res.profile)
print(f"invariants: h = {inv.h}, m = {inv.m}, N = {inv.N}")
for C in (0, 1):
    b = final_bound(res.d, inv.m, inv.h, inv.N, BoundConfig(C))
    print(f"size bound with C = {C}: {b.sci()}")
