"""E(pi, k) split as a twisted product K(pi, k) x_tau K(pi, k+1).

    python3 demos/twisted_product.py
"""
from simploc import FiniteAbelianGroup, check_twisting_axioms, e_as_twisted_product_iso
from simploc.twist import canonical_twisting

Z3 = FiniteAbelianGroup.cyclic(3)

tau = canonical_twisting(Z3, 1)
rep = check_twisting_axioms(tau, 3)
print(f"canonical tau: {rep.checked} base simplices checked, {len(rep.violations)} violations")

# flipping one sign breaks the d_0 axiom over Z/3
flipped = check_twisting_axioms(canonical_twisting(Z3, 1, sign=+1), 3)
print(f"sign-flipped tau: {len(flipped.violations)} violations, e.g. {flipped.violations[0].axiom}")

iso = e_as_twisted_product_iso(Z3, 1, 3)
print("section:", iso.section)
for d in iso.degrees:
    print(f"  n={d.degree}: |E| = {d.size_E:6d}  |K x K| = {d.size_pairs:6d}  ok = {d.ok}")
