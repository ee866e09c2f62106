import pytest

from regpart.errors import ComputationCapExceeded, RankObstruction
from regpart.forms import VERIFIED_TO_STURM
from regpart.lab import (
    ZERO_SCALAR,
    CongruenceReport,
    b_values_check,
    d_bounds,
    discover_scalar,
    frak_b_bound,
    module_rank,
    rank_bound,
    rank_bound_via_dims,
    stabilization_scan,
)
from regpart.linalg import invert_unit


def test_rank_bound_values():
    assert [rank_bound(p) for p in (5, 7, 11)] == [0, 0, 0]
    assert all(rank_bound(p) == 1 for p in (13, 17, 19, 23, 29, 31))
    assert rank_bound_via_dims(17) == 1


def test_module_rank():
    assert module_rank(5, 1, 1, 3) == 0
    assert module_rank(17, 1, 1, 3) == 1
    assert module_rank(17, 1, 1, 0) == 0


def test_scan_zero_case():
    t = stabilization_scan(5, 1, "odd", 5)
    assert set(t.entries.values()) == {0}
    assert t.onset == 1


def test_scan_rank_one():
    t = stabilization_scan(17, 1, "odd", 5)
    assert t.entries == {1: 1, 3: 1, 5: 1}
    assert t.onset == 1 and t.conclusive
    assert all(s == VERIFIED_TO_STURM for s in t.statuses.values())
    # nested modules: ranks never increase with b
    ranks = [t.entries[b] for b in sorted(t.entries)]
    assert ranks == sorted(ranks, reverse=True)


def test_scan_rejects_bad_parity():
    with pytest.raises(ValueError):
        stabilization_scan(17, 1, "sideways", 5)
    with pytest.raises(ValueError):
        stabilization_scan(17, 1, "even", 1)


def test_discover_17_mod_17():
    rep = discover_scalar(17, 1, 3, 1, check_n=10)
    assert rep.scalar == 14
    assert rep.status == VERIFIED_TO_STURM
    assert rep.cross_check_n_max == 10
    assert all(c["lhs"] == c["rhs"] for c in rep.checks)
    lhs = [c["lhs"] for c in rep.checks[:3]]
    assert lhs == [7, 995 % 17, 30176 % 17]
    assert [c["index_rhs"] for c in rep.checks[:3]] == [1637, 6550, 11463]


def test_discover_17_mod_289():
    rep = discover_scalar(17, 1, 3, 2, check_n=4)
    assert rep.scalar == invert_unit(283, 289) == 48
    assert rep.scalar % 17 == 14
    assert all(c["lhs"] == c["rhs"] for c in rep.checks)


@pytest.mark.parametrize("ell", [5, 7, 11])
def test_discover_zero_scalar(ell):
    rep = discover_scalar(ell, 1, 3, 1, check_n=5)
    assert rep.status == ZERO_SCALAR
    assert all(c["lhs"] == 0 for c in rep.checks)


def test_discover_preconditions():
    with pytest.raises(ValueError):
        discover_scalar(17, 1, 2, 1)
    with pytest.raises(ValueError):
        discover_scalar(17, 3, 1, 1)


def test_rank_obstruction():
    with pytest.raises(RankObstruction):
        discover_scalar(17, 1, 3, 3, prec=30, check_n=-1)


def test_b_values_check_zero_scalar_n30():
    rep = CongruenceReport(5, 1, 1, 3, 0, 0, 0, ZERO_SCALAR)
    res = b_values_check(rep, 30)
    assert res.passed and all(c["lhs"] == 0 for c in res.checks)


def test_b_values_check_detects_wrong_scalar():
    rep = CongruenceReport(17, 1, 1, 3, 13, 0, 0, VERIFIED_TO_STURM)
    res = b_values_check(rep, 2)
    assert not res.passed and res.failing
    rep.scalar = 14
    assert b_values_check(rep, 0).passed


def test_d_bounds_and_frak_b():
    assert d_bounds(5) == (0, 0)
    assert frak_b_bound(5, 1) == 1
    assert [frak_b_bound(13, m) for m in (1, 2, 3)] == sorted(frak_b_bound(13, m) for m in (1, 2, 3))
    with pytest.raises(ComputationCapExceeded):
        d_bounds(23)


@pytest.mark.parametrize("ell", [5, 13, 17])
def test_onset_within_frak_b(ell):
    t = stabilization_scan(ell, 1, "odd", 5)
    assert t.onset <= frak_b_bound(ell, 1)
