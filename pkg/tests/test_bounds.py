import math
from fractions import Fraction

import pytest

from simploc.bounds import (
    BoundConfig,
    BoundValue,
    check_size_chain,
    check_homotopy_chain,
    final_bound,
    homotopy_bounds,
    homotopy_order_bound,
    homotopy_order_bound_p,
    log_stage_size_bound,
    rank_bound,
    stage_size_bound,
    sweep_chains,
    torsion_exponent_bound,
    tower_degree_bound,
    tower_size_bound,
)

C0, C1 = BoundConfig(0), BoundConfig(1)


def _f(n, C):
    return math.exp(C * math.log(n) ** 3)


def test_rank_bound():
    assert rank_bound(2, 1, C0).exact == 1
    assert rank_bound(3, 0, C1).is_zero
    # oracle: f(n) h^n in floating point
    for n in range(2, 7):
        for h in (1, 2, 3):
            v = float(rank_bound(n, h, C1).log_hi)
            assert v == pytest.approx(math.log(_f(n, 1) * h ** n), rel=1e-12)


def test_rank_bound_monotone():
    for n in range(2, 6):
        for h in (1, 2, 3):
            assert rank_bound(n, h, C1) <= rank_bound(n, h + 1, C1)
            assert rank_bound(n, h, BoundConfig(1)) <= rank_bound(n, h, BoundConfig(2)) or n == 1


def test_torsion_exponent():
    assert torsion_exponent_bound(3, 1) == 6
    assert torsion_exponent_bound(4, 0) == 0
    assert [torsion_exponent_bound(n, 2) for n in (2, 3, 4)] == [8, 12, 16]


def test_prime_order_bound_examples():
    b = homotopy_order_bound_p(2, 2, 1, 2, C0)
    assert b.pre_absorption.exact == 65536
    assert homotopy_order_bound_p(3, 3, 0, 2, C1).value.exact == 1


def test_closed_form_dominates_pre_absorption():
    for n in range(2, 9):
        for p in (2, 3, 5):
            for m in (1, 2, 3):
                for h in (2, 3, 4):
                    for cfg in (C0, C1):
                        b = homotopy_order_bound_p(n, p, m, h, cfg)
                        # equality at n = 2, where C7 log(2)^3 = log 4
                        assert b.pre_absorption.not_above(b.closed), (n, p, m, h, cfg)


def test_literal_mode_can_refute_absorption():
    # with C used verbatim the closed form drops below the pre-absorption value
    cfg = BoundConfig(0, "literal")
    b = homotopy_order_bound_p(2, 2, 1, 2, cfg)
    assert not b.pre_absorption.not_above(b.closed)


def test_degenerate_h1():
    b = homotopy_order_bound_p(3, 2, 1, 1, C1)
    assert b.degenerate and b.closed is None and "degenerates" in b.note


def test_combined_bound():
    assert homotopy_order_bound(3, 2, 1, 2, C1).exact == 1
    for n in (2, 3, 4):
        for m in (1, 2):
            for h in (2, 3):
                hb = homotopy_bounds(n, {2: h}, {2: m}, C1)
                assert hb.per_prime[2].value.not_above(hb.combined)
                for bigger in ((n + 1, m, 2, h), (n, m + 1, 2, h), (n, m, 6, h), (n, m, 2, h + 1)):
                    assert homotopy_order_bound(n, m, 2, h, C1) <= homotopy_order_bound(*bigger, C1)


def test_stage_size_bound():
    assert stage_size_bound(3, 2, [2]) == 12 == 1 + 1 + 2 + 8
    for n in range(6):
        assert stage_size_bound(n, 3, [1, 1]) == n + 1
    # oracle: direct sum
    assert stage_size_bound(4, 3, [2, 3]) == sum(2 ** math.comb(l, 2) * 3 ** math.comb(l, 3) for l in range(5))
    L = log_stage_size_bound(4, 3, [BoundValue.from_int(2).log, BoundValue.from_int(3).log])
    assert float(BoundValue(L).log_hi) == pytest.approx(math.log(stage_size_bound(4, 3, [2, 3])))


def test_final_bound():
    assert final_bound(3, 1, 2, 1, C1).exact == 1
    for d in (2, 3, 4):
        assert final_bound(d, 1, 2, 2, C1) <= final_bound(d + 1, 1, 2, 2, C1)
        assert final_bound(d, 1, 2, 2, C1) <= final_bound(d, 2, 2, 2, C1)
        assert final_bound(d, 1, 2, 2, C1) <= final_bound(d, 1, 3, 2, C1)
        assert final_bound(d, 1, 2, 2, C1) <= final_bound(d, 1, 2, 6, C1)


def test_final_dominates_tower():
    for C in (0, 1, 5):
        cfg = BoundConfig(C)
        for d in range(2, 7):
            for h in (1, 2, 3):
                for m in (1, 2):
                    for N in (2, 6):
                        fb = final_bound(d, m, h, N, cfg)
                        assert tower_size_bound(d, m, h, N, cfg).not_above(fb)
                        assert tower_degree_bound(d, m, h, N, cfg).not_above(fb)


def test_prop33_chain_single():
    steps = check_homotopy_chain(4, 3, 2, 3, C1)
    assert [s.status for s in steps] == ["holds"] * 5


def test_lemma53_chain_single():
    steps = check_size_chain(5, 2, 3, 6, C1)
    assert all(s.status in ("holds", "skipped") for s in steps)


def test_sweep_absorbed_small():
    res = sweep_chains(max_n=4, hs=(2, 3), ms=(1, 2), primes=(2, 3), Ns=(2, 6))
    assert res.ok and res.checked > 0


def test_sweep_literal_reports_failures():
    res = sweep_chains((BoundConfig(1, "literal"),), max_n=4, hs=(2,), ms=(1,), primes=(2,), Ns=(2,))
    assert not res.ok


def test_config_validation():
    with pytest.raises(ValueError):
        BoundConfig(-1)
    with pytest.raises(ValueError):
        BoundConfig(1, "other")
    assert BoundConfig(Fraction(1, 2)).C_log3 == Fraction(1, 2)
