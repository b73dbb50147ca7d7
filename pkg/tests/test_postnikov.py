import pytest

from oracles import rank_mod_p, rational_rank
from simploc.bounds import stage_size_bound
from simploc.em import build_em_skeleton, em_cardinality, subset_index
from simploc.groups import FiniteAbelianGroup
from simploc.homology import local_homology, normalized_chain_complex
from simploc.io import read_sset
from simploc.postnikov import (
    CocycleMap,
    MissingKInvariants,
    PipelineError,
    boundary_basis_check,
    hurewicz_stage2,
    lift_map,
    pipeline,
    prune,
    pullback_stage,
    select_basis_simplices,
    select_unit_columns,
    verify_homology_iso,
)
from simploc.sset import SimplicialMap, check_simplicial_identities, point, standard_simplex

Z2 = FiniteAbelianGroup.cyclic(2)


@pytest.fixture(scope="module")
def K2():
    return build_em_skeleton(Z2, 2, "K", 5)


@pytest.fixture(scope="module")
def srp2():
    from conftest import CORPUS

    return read_sset(CORPUS / "sigma-rp2.sset")


def _cup_square(K2):
    idx = subset_index(4, 3)
    vals = tuple((z[idx[(0, 1, 2)]] * z[idx[(2, 3, 4)]]) % 2 for z in K2.names[4])
    return CocycleMap(K2, Z2, 4, vals)


# -- stages -------------------------------------------------------------------

def test_trivial_kinv_gives_product(K2):
    st = pullback_stage(CocycleMap.zero(K2, Z2, 4), 4)
    want = [K2.total_count(n) * em_cardinality(Z2, 3, n) for n in range(5)]
    assert list(st.total_counts()) == want
    assert check_simplicial_identities(st.space) == []
    assert st.projection.violations() == []
    assert sum(st.total_counts()) <= stage_size_bound(4, 3, [2, 2])


def test_identity_kinv_gives_e():
    K3 = build_em_skeleton(Z2, 3, "K", 4)
    ident = CocycleMap(K3, Z2, 3, tuple(K3.names[3][i][0] for i in range(K3.count(3))))
    assert ident.is_cocycle()
    st = pullback_stage(ident, 4)
    assert list(st.total_counts()) == [em_cardinality(Z2, 2, n, "E") for n in range(5)]
    assert check_simplicial_identities(st.space) == []


def test_cup_square_stage_fibre_count(K2):
    cs = _cup_square(K2)
    assert cs.is_cocycle() and any(cs.values)
    st = pullback_stage(cs, 4)
    assert list(st.total_counts()) == [K2.total_count(n) * em_cardinality(Z2, 3, n) for n in range(5)]
    assert check_simplicial_identities(st.space) == []
    assert sum(st.total_counts()) <= stage_size_bound(4, 3, [2, 2])


def test_non_cocycle_kinv_rejected(K2):
    vals = [0] * K2.count(4)
    vals[0] = 1
    bad = CocycleMap(K2, Z2, 4, tuple(vals))
    if not bad.is_cocycle():
        with pytest.raises(Exception):
            pullback_stage(bad, 4)


# -- Hurewicz bootstrap -------------------------------------------------------

def test_hurewicz_sigma_rp2(srp2):
    s2 = hurewicz_stage2(srp2, up_to=4)
    assert s2.pi2.invariant_factors == (2,)
    assert s2.phi.violations() == []
    assert verify_homology_iso(s2.phi, 2).ok
    assert verify_homology_iso(s2.phi, 2, p=2).ok
    assert check_simplicial_identities(s2.stage.space) == []
    assert sum(s2.stage.total_counts()[:4]) == stage_size_bound(3, 2, [2]) == 12


def test_hurewicz_trivial_h2():
    s2 = hurewicz_stage2(standard_simplex(3), up_to=3)
    assert s2.pi2.is_trivial
    assert all(c == (1 if n == 0 else 0) for n, c in enumerate(s2.stage.counts()))


def test_not_simply_connected_rejected():
    from conftest import CORPUS

    with pytest.raises(PipelineError):
        hurewicz_stage2(read_sset(CORPUS / "rp2.sset"))


def test_lift_map_commutes(K2, srp2):
    s2 = hurewicz_stage2(srp2, up_to=4)
    kinv = CocycleMap.zero(s2.stage.space, Z2, 4)
    st = pullback_stage(kinv, 4)
    phi3 = lift_map(s2.phi, st, kinv)
    assert phi3.violations() == []
    # projection after the lift recovers phi_2
    for n in range(srp2.top_degree + 1):
        for i in range(srp2.count(n)):
            assert st.projection.image(phi3.images[n][i]) == s2.phi.images[n][i]


# -- pruning ------------------------------------------------------------------

def test_select_unit_columns():
    assert select_unit_columns([[2, 3]], 2) == [1]
    assert select_unit_columns([[3, 5]], 2) == [0]
    with pytest.raises(ArithmeticError):
        select_unit_columns([[2, 4]], 2)


def test_prune_k_z2_2(K2):
    from simploc.sset import skeleton

    W = skeleton(K2, 4)
    pr = prune(W, 2, 2)
    C = normalized_chain_complex(pr.Y)
    assert [str(local_homology(C, n, 2)) for n in range(5)] == ["Z", "0", "Z/2", "0", "0"]
    assert boundary_basis_check(pr.Y, 2, 2) == (True, True)
    assert check_simplicial_identities(pr.Y) == []
    # oracle: |T| = rank of the degree-4 boundary over Q, and mod 2 it keeps full rank
    D4 = normalized_chain_complex(W).boundary(4).tolist()
    assert len(pr.T) == rational_rank(D4)
    Dy = C.boundary(4).tolist()
    assert rank_mod_p(Dy, 2) == len(pr.T)
    # lower degrees untouched
    assert pr.Y.counts()[:4] == W.counts()[:4]
    assert select_basis_simplices(W, 2, 2) == list(pr.T)


def test_prune_nothing_to_remove():
    W = point(4)
    pr = prune(W, 2, 2)
    assert pr.T == () and pr.Y.counts() == W.counts()


# -- pipeline -----------------------------------------------------------------

def test_pipeline_sigma_rp2_bootstrap(srp2):
    res = pipeline(srp2, 2, bootstrap=True)
    assert res.ok and res.iso.ok
    assert res.d == 3 and res.d_effective == 2
    assert res.Y.counts() == (1, 0, 1, 4, 3)
    assert [v.status for v in res.verdicts if v.step.startswith("stage ")].count("skipped") == 2


def test_pipeline_needs_kinvs(srp2):
    with pytest.raises(MissingKInvariants):
        pipeline(srp2, 2)


def test_pipeline_contractible():
    res = pipeline(standard_simplex(3), 3)
    assert res.ok
    assert all(c == (1 if n == 0 else 0) for n, c in enumerate(res.Y.counts()))


def test_pipeline_moore_space():
    from conftest import CORPUS

    res = pipeline(read_sset(CORPUS / "moore-z2-2.sset"), 2, bootstrap=True)
    assert res.ok and res.stages[0].group.invariant_factors == (2,)


def test_final_bound_dominates_output(srp2):
    from simploc.bounds import BoundConfig, final_bound
    from simploc.homology import invariants

    res = pipeline(srp2, 2, bootstrap=True)
    inv = invariants(res.profile)
    fb = final_bound(res.d, inv.m, inv.h, inv.N, BoundConfig(0))
    total = sum(res.Y.total_count(n) for n in range(res.Y.top_degree + 1))
    from simploc.bounds import BoundValue

    assert BoundValue.from_int(total) <= fb
