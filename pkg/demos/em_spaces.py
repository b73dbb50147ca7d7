"""Eilenberg-MacLane models: counting, building and reading off homology.

    python3 demos/em_spaces.py
"""
from math import comb

from simploc import FiniteAbelianGroup, build_em_skeleton, em_cardinality
from simploc.homology import homology, normalized_chain_complex

Z2 = FiniteAbelianGroup.cyclic(2)

# The n-simplices of K(pi, k) are pi-valued k-cocycles on Delta^n.  A cocycle
# is pinned down by its labels on the faces through vertex 0, so there are
# |pi|^C(n, k) of them.
for n in range(6):
    print(f"|K(Z/2,1)_{n}| = {em_cardinality(Z2, 1, n)} = 2^{comb(n, 1)}")

# Materialize the 5-skeleton.  Only nondegenerate simplices are stored.
K = build_em_skeleton(Z2, 1, "K", 5)
print("nondegenerate counts:", K.counts())

# K(Z/2,1) is RP^infinity: Z/2 in odd degrees, 0 in positive even degrees.
# The top degree is dropped because its homology ignores missing 6-simplices.
C = normalized_chain_complex(K)
for n in range(5):
    print(f"H_{n} = {homology(C, n)}")
