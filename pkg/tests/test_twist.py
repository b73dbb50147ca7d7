import pytest

from simploc.em import Cochain, EMModel, build_em_skeleton, em_cardinality, extend_free_labels
from simploc.groups import FiniteAbelianGroup
from simploc.sset import check_simplicial_identities, product
from simploc.twist import (
    TwistingAxiomError,
    canonical_tau,
    canonical_twisting,
    check_twisting_axioms,
    e_as_twisted_product_iso,
    split,
    trivial_twisting,
    twisted_product,
    unsplit,
)

Z2, Z3 = FiniteAbelianGroup.cyclic(2), FiniteAbelianGroup.cyclic(3)


def test_tau_examples():
    z = Cochain.from_mapping(Z3, 2, 1, {(0, 1): 1, (0, 2): 2, (1, 2): 1})
    t = canonical_tau(z)
    assert (t.dim, t.degree) == (1, 0)
    assert t.labels == (1, 1)
    assert not any(canonical_tau(Cochain.zero(Z3, 3, 2)).labels)


def test_trivial_twisting_ok():
    B = EMModel(Z2, 2)
    assert check_twisting_axioms(trivial_twisting(B, EMModel(Z2, 1)), 4).ok


@pytest.mark.parametrize("G,k,up_to", [(Z2, 1, 4), (Z2, 0, 4), (Z3, 0, 4), (Z3, 1, 3)])
def test_canonical_tau_axioms(G, k, up_to):
    rep = check_twisting_axioms(canonical_twisting(G, k), up_to)
    assert rep.ok and rep.checked > 0


def test_sign_flip_violates_d0():
    rep = check_twisting_axioms(canonical_twisting(Z3, 1, sign=+1), 3)
    assert not rep.ok
    assert any(v.axiom == "d_0" for v in rep.violations)


def test_tau_of_degenerate_is_zero():
    tau = canonical_twisting(Z3, 1)
    B = tau.base
    for n in range(1, 4):
        for b in B.simplices(n - 1):
            assert not any(tau(B.degeneracy_n(b, n - 1, 0), n))


def test_trivial_twist_is_product():
    F, B = build_em_skeleton(Z2, 1, "K", 3), build_em_skeleton(Z2, 2, "K", 3)
    T = twisted_product(EMModel(Z2, 1), EMModel(Z2, 2), trivial_twisting(EMModel(Z2, 2), EMModel(Z2, 1)), 3)
    assert T.counts() == product(F, B, 3).counts()


def test_k1_k2_twisted_product_matches_e():
    T = twisted_product(EMModel(Z2, 1), EMModel(Z2, 2), canonical_twisting(Z2, 1), 4)
    assert [T.total_count(n) for n in range(5)] == [em_cardinality(Z2, 1, n, "E") for n in range(5)]
    assert check_simplicial_identities(T) == []


def test_axiom_gate_refuses_bad_tau():
    with pytest.raises(TwistingAxiomError):
        twisted_product(EMModel(Z3, 1), EMModel(Z3, 2), canonical_twisting(Z3, 1, sign=+1), 3)


@pytest.mark.parametrize("G,k,up_to", [(Z2, 0, 4), (Z2, 1, 4), (Z2, 2, 4), (Z3, 0, 4), (Z3, 1, 3)])
def test_iso(G, k, up_to):
    rep = e_as_twisted_product_iso(G, k, up_to)
    assert rep.ok
    assert [d.size_E for d in rep.degrees] == [d.size_pairs for d in rep.degrees]


def test_split_roundtrip():
    e = (1, 2, 0)  # a Z/3 1-cochain on Delta^2
    f, b = split(Z3, e, 2, 1)
    assert unsplit(Z3, f, b, 2, 1) == e
