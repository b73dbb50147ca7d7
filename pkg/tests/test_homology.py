import pytest

from oracles import rank_mod_p, rational_rank
from simploc.em import build_em_skeleton
from simploc.groups import FiniteAbelianGroup
from simploc.homology import (
    HomologyGroup,
    HomologyProfile,
    InfiniteHomologyError,
    homology,
    homology_iso_report,
    invariants,
    local_homology,
    normalized_chain_complex,
)
from simploc.io import read_sset
from simploc.sset import SimplicialMap, boundary_simplex, point, sphere, standard_simplex

Z2 = FiniteAbelianGroup.cyclic(2)


def _groups(S, top=None):
    C = normalized_chain_complex(S)
    top = C.top if top is None else top
    return [str(homology(C, n)) for n in range(top + 1)]


def test_delta1_boundary_matrix():
    C = normalized_chain_complex(standard_simplex(1))
    assert C.boundary(1).tolist() == [[-1], [1]]


def test_moore_style_top_boundary_zero():
    C = normalized_chain_complex(sphere(3))
    assert C.boundary(3).is_zero()


def test_boundary_tetrahedron():
    assert _groups(boundary_simplex(3)) == ["Z", "0", "Z"]


@pytest.mark.parametrize("n", range(5))
def test_simplex_contractible(n):
    assert _groups(standard_simplex(n)) == ["Z"] + ["0"] * n


def test_k_z2_1_skeleton():
    S = build_em_skeleton(Z2, 1, "K", 5)
    g = _groups(S, 4)
    assert g[:4] == ["Z", "Z/2", "0", "Z/2"]
    assert g[4] == "0"


def test_dd_zero_on_corpus(corpus):
    for f in sorted(corpus.glob("*.sset")):
        assert normalized_chain_complex(read_sset(f)).violations() == [], f.name


def _mod_p_betti(C, n, p):
    """dim H_n(C; F_p) from ranks mod p."""
    dn = C.boundary(n).tolist() if C.boundary(n).rows else []
    rk_n = rank_mod_p(dn, p) if dn else 0
    dn1 = C.boundary(n + 1).tolist() if C.boundary(n + 1).rows and C.rank(n + 1) else []
    rk_n1 = rank_mod_p(dn1, p) if dn1 else 0
    return C.rank(n) - rk_n - rk_n1


@pytest.mark.parametrize("name", ["delta3", "boundary-delta3", "rp2", "sigma-rp2", "moore-z2-2"])
@pytest.mark.parametrize("p", [2, 3])
def test_universal_coefficients_oracle(corpus, name, p):
    C = normalized_chain_complex(read_sset(corpus / f"{name}.sset"))
    H = [homology(C, n) for n in range(C.top + 1)]
    for n in range(C.top + 1):
        tp = lambda g: sum(1 for t in g.torsion if t % p == 0)
        want = H[n].free_rank + tp(H[n]) + (tp(H[n - 1]) if n else 0)
        assert _mod_p_betti(C, n, p) == want


@pytest.mark.parametrize("name", ["rp2", "sigma-rp2", "boundary-delta3"])
def test_betti_numbers_rational_oracle(corpus, name):
    C = normalized_chain_complex(read_sset(corpus / f"{name}.sset"))
    for n in range(C.top + 1):
        r = C.rank(n) - (rational_rank(C.boundary(n).tolist()) if C.boundary(n).rows else 0) \
            - (rational_rank(C.boundary(n + 1).tolist()) if n < C.top else 0)
        assert homology(C, n).free_rank == r


def test_local_homology():
    H = HomologyGroup.from_divisors(0, [2, 4, 3])
    assert H.local(2) == HomologyGroup(0, (2, 4))
    assert HomologyGroup(0, (3,)).local(2).is_trivial
    assert HomologyGroup(2).local(5) == HomologyGroup(2)
    C = normalized_chain_complex(read_sset_name("rp2"))
    assert str(local_homology(C, 1, 2)) == "Z/2"
    assert str(local_homology(C, 1, 3)) == "0"


def read_sset_name(name):
    from conftest import CORPUS

    return read_sset(CORPUS / f"{name}.sset")


def test_invariants_examples():
    prof = HomologyProfile((HomologyGroup(1), HomologyGroup(), HomologyGroup.from_divisors(0, [2, 4]),
                            HomologyGroup(0, (3,))))
    inv = invariants(prof)
    assert (inv.h_p, inv.m_p) == ({2: 2, 3: 1}, {2: 2, 3: 1})
    assert (inv.h, inv.m, inv.N) == (2, 2, 6)
    triv = invariants(HomologyProfile((HomologyGroup(1), HomologyGroup())))
    assert (triv.h, triv.m, triv.N) == (0, 0, 1)
    one = invariants(HomologyProfile((HomologyGroup(1), HomologyGroup(0, (5,)))))
    assert (one.h, one.m, one.N, one.h_p, one.m_p) == (1, 1, 5, {5: 1}, {5: 1})


def test_infinite_homology_rejected():
    with pytest.raises(InfiniteHomologyError):
        invariants(HomologyProfile.of(boundary_simplex(3)))


def test_iso_reports():
    S = read_sset_name("rp2")
    assert homology_iso_report(SimplicialMap.identity(S), 1).ok
    D = standard_simplex(3)
    f = SimplicialMap.constant(D, point(3))
    assert homology_iso_report(f, 2).ok
    # rp2 -> point fails in degree 1 over Z and Z_(2) but not over Z_(3)
    g = SimplicialMap.constant(S, point(2))
    assert homology_iso_report(g, 1).failures() == [1]
    assert homology_iso_report(g, 1, p=2).failures() == [1]
    assert homology_iso_report(g, 1, p=3).ok
