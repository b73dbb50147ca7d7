from math import comb

import numpy as np
import pytest

from oracles import brute_force_cocycles
from simploc.em import (
    Cochain,
    EMModel,
    build_em_skeleton,
    coboundary_map,
    cochains_are_cocycles,
    cone_lift,
    count_cocycles,
    em_cardinality,
    em_operator,
    enumerate_cocycles,
    extend_free_labels,
    is_cocycle,
)
from simploc.groups import FiniteAbelianGroup
from simploc.sset import BudgetExceeded, MonotoneMap, check_simplicial_identities

Z2, Z3, Z4 = (FiniteAbelianGroup.cyclic(q) for q in (2, 3, 4))
Z2Z2 = FiniteAbelianGroup.from_orders([2, 2])


def test_cocycle_examples():
    assert is_cocycle(Cochain.zero(Z3, 2, 1))
    z = Cochain.from_mapping(Z3, 2, 1, {(0, 1): 1, (0, 2): 2, (1, 2): 1})
    assert is_cocycle(z)
    z2 = Cochain.from_mapping(Z3, 2, 1, {(0, 1): 1, (0, 2): 2, (1, 2): 2})
    assert not is_cocycle(z2)


def test_extend_free_labels_example():
    z = extend_free_labels({(0, 1): 1, (0, 2): 2}, 2, 1, Z3)
    assert z[(1, 2)] == 1 and is_cocycle(z)
    assert extend_free_labels({(0, 1): 0, (0, 2): 0}, 2, 1, Z3) == Cochain.zero(Z3, 2, 1)


def test_free_labelings_give_all_cocycles_z2_k1_n3():
    arr = enumerate_cocycles(Z2, 1, 3)
    assert len({tuple(r) for r in arr.tolist()}) == 8 == 2 ** comb(3, 1)


@pytest.mark.parametrize("q,k,n", [(2, 1, 3), (2, 1, 4), (3, 1, 3), (2, 2, 3), (2, 2, 4), (3, 2, 3), (4, 1, 3)])
def test_enumeration_matches_brute_force(q, k, n):
    G = FiniteAbelianGroup.cyclic(q)
    got = {tuple(r) for r in enumerate_cocycles(G, k, n).tolist()}
    want = set(brute_force_cocycles(q, k, n))
    assert got == want


@pytest.mark.parametrize("G", [Z2, Z3, Z4, Z2Z2])
def test_cocycle_count_oracle(G):
    for k in (1, 2):
        for n in range(5):
            assert count_cocycles(G, k, n) == G.order ** comb(n, k) == em_cardinality(G, k, n)


def test_cardinality_examples():
    assert em_cardinality(Z2, 2, 3, "K") == 8
    assert em_cardinality(Z3, 1, 2, "E") == 27
    for G in (Z2, Z3, Z2Z2):
        assert all(em_cardinality(G, 3, n) == 1 for n in range(3))


def test_operators():
    z = extend_free_labels({(0, 1): 1, (0, 2): 2, (0, 3): 1}, 3, 1, Z3)
    assert em_operator(z, MonotoneMap.identity(3)) == z
    for i in range(4):
        f = z.face(i)
        assert is_cocycle(f)
        assert f.dim == 2
    assert z.degeneracy(0).face(0) == z
    assert em_operator(z, MonotoneMap.coface(3, 0)) == z.face(0)


def test_coboundary_examples():
    e = Cochain(Z2, 2, 0, (1, 0, 0))
    de = coboundary_map(e)
    assert de.as_dict() == {(0, 1): 1, (0, 2): 1, (1, 2): 0}
    assert is_cocycle(de) and not any(coboundary_map(de).labels)
    z = extend_free_labels({(0, 1): 1, (0, 2): 1}, 2, 1, Z2)
    assert not any(coboundary_map(z).labels)


def test_cone_lift_inverts_coboundary():
    for labels in enumerate_cocycles(Z3, 2, 3).tolist():
        z = Cochain(Z3, 3, 2, tuple(labels))
        assert coboundary_map(cone_lift(z)) == z


def test_vectorized_cocycle_check_agrees():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 3, size=(200, comb(4, 2)))
    fast = cochains_are_cocycles(Z3, 1, 3, labels)
    slow = [is_cocycle(Cochain(Z3, 3, 1, tuple(int(x) for x in r))) for r in labels]
    assert fast.tolist() == slow


def test_k_z2_1_totals_and_identities():
    S = build_em_skeleton(Z2, 1, "K", 3)
    assert [S.total_count(n) for n in range(4)] == [1, 2, 4, 8]
    assert check_simplicial_identities(S) == []


@pytest.mark.parametrize("G,k,space,up_to", [(Z2, 2, "K", 4), (Z3, 1, "E", 3), (Z2Z2, 1, "K", 3), (Z4, 2, "K", 3)])
def test_build_identities_and_totals(G, k, space, up_to):
    S = build_em_skeleton(G, k, space, up_to)
    assert check_simplicial_identities(S) == []
    assert [S.total_count(n) for n in range(up_to + 1)] == [em_cardinality(G, k, n, space) for n in range(up_to + 1)]


def test_single_simplex_below_k():
    S = build_em_skeleton(Z3, 2, "K", 2)
    assert S.counts()[:2] == (1, 0)


def test_known_generator_counts():
    assert build_em_skeleton(Z2, 2, "K", 4).counts() == (1, 0, 1, 4, 41)
    assert build_em_skeleton(Z3, 1, "E", 3).counts() == (1, 2, 22, 656)


def test_budget_names_degree():
    with pytest.raises(BudgetExceeded) as e:
        build_em_skeleton(Z2, 1, "K", 6, budget=40)
    assert e.value.degree == 6


def test_model_protocol():
    M = EMModel(Z2, 1)
    xs = list(M.simplices(2))
    assert len(xs) == 4
    assert sum(1 for x in xs if not M.is_degenerate(x, 2)) == len(list(M.nondegenerate(2)))
