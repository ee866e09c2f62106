import random

import pytest

from oracles import delta_coeffs, regular_partitions
from regpart import engine
from regpart.character import make_context
from regpart.engine import (
    AUTO,
    EXTRACT,
    LEVEL1,
    OPERATOR,
    RInfo,
    RSeriesRequest,
    a_ell,
    b_coefficient_index,
    b_ell_exact,
    b_ell_series,
    b_series_from_r,
    b_values,
    d_c_operator,
    hecke_t,
    k_ladder,
    k_value,
    phi_ell,
    phi_power,
    plan_precision,
    r_offset,
    r_series,
    r_series_info,
    r_weight,
    u_operator,
    v_operator,
    x_c_operator,
    y_c_operator,
)
from regpart.errors import Cancelled, InsufficientPrecision, NonIntegralExponents
from regpart.eta import EtaQuotient
from regpart.forms import VERIFIED_TO_STURM, delta_series, eisenstein_level1, match_level1_form
from regpart.series import ZZ, FracQSeries, Zmod, eta_expansion, reduce_mod, series_mul, series_pow


def test_b17_paper_values():
    assert [b_ell_exact(17, n) for n in (5, 22, 39)] == [7, 995, 30176]
    assert b_ell_exact(17, 1637) == 16073386675530933163774672019535658494433
    assert b_ell_exact(17, 0) == 1


def test_b5_brute_force():
    assert [b_ell_exact(5, n) for n in range(26)] == [regular_partitions(n, 5) for n in range(26)]


def test_b_series_small_and_residue():
    for ell in (5, 7, 11, 13, 17):
        assert b_ell_series(ell, 3).to_list() == [1, 1, 2]
    g = b_ell_series(17, 40, Zmod(17))
    assert g[22] == 995 % 17 == 9
    ex = [b_ell_exact(13, n) for n in range(500)]
    assert reduce_mod(b_ell_series(13, 500), 169).to_list() == [x % 169 for x in ex]
    assert b_ell_series(13, 500, Zmod(169)).to_list() == [x % 169 for x in ex]


def test_phi_and_a():
    assert phi_ell(5, 10).offset == 1
    assert a_ell(5, 100, Zmod(5)).to_list() == [1] + [0] * 99
    # Phi^c = Delta^(c(l^2-1)/24) mod l, for l = 13
    ctx = make_context(13)
    e = ctx.c * (13**2 - 1) // 24
    lhs = phi_power(ctx, 50, Zmod(13))
    rhs = series_pow(delta_series(50, Zmod(13)), e)
    assert lhs.offset == e
    assert lhs.agrees(rhs.realign(24 * e))


def test_u_and_v():
    geo = FracQSeries.from_coeffs([1] * 50)
    assert u_operator(geo, 5).to_list() == [1] * 10
    rnd = random.Random(1)
    f = FracQSeries.from_coeffs([rnd.randrange(-99, 99) for _ in range(100)])
    assert u_operator(v_operator(f, 7), 7) == f
    d = delta_series(200)
    assert u_operator(d, 17)[1] == delta_coeffs(17)[16]
    with pytest.raises(NonIntegralExponents):
        u_operator(eta_expansion(1, 10), 5)


def test_hecke_eigenvalue_delta():
    d = delta_series(260)
    t = hecke_t(d, 5, 12)
    for n in range(1, 50):
        assert t[n] == 4830 * d[n]
    zero = FracQSeries.from_coeffs([], prec=50)
    assert hecke_t(zero, 5, 12).is_zero()


def test_d_c_examples():
    # R_5(0) | D_20 = (eta(25z)^20 eta(5z) / eta(z)) | U(5) = 5 Delta^5 mod 125
    ctx = make_context(5)
    R = Zmod(125)
    q = EtaQuotient(25, {25: 20, 5: 1, 1: -1})
    direct = u_operator(q.expand(400, R), 5)
    r0 = EtaQuotient(5, {5: 1, 1: 19}).expand(400, R)
    via = d_c_operator(r0, ctx)
    n = min(direct.known_to, via.known_to)
    assert direct.window(0, n) == via.window(0, n)
    five_delta5 = series_pow(delta_series(n, R), 5) * 5
    assert via.window(0, n) == five_delta5.window(0, n)
    zero = FracQSeries.from_coeffs([], R, prec=100)
    assert d_c_operator(zero, ctx).is_zero()


@pytest.mark.parametrize("ell", [5, 7, 13, 17])
def test_d_c_output_order(ell):
    import math
    ctx = make_context(ell)
    R = Zmod(ell**2)
    rnd = random.Random(ell)
    f = FracQSeries.from_coeffs([rnd.randrange(ell**2) for _ in range(400)], R)
    g = d_c_operator(f, ctx).normalize()
    if not g.is_zero():
        assert g.offset >= math.ceil(ctx.c * (ell**2 - 1) / (24 * ell))


def test_x_and_y_compose():
    ctx = make_context(7)
    R = Zmod(49)
    f = FracQSeries.from_coeffs([random.Random(2).randrange(49) for _ in range(2000)], R)
    x = x_c_operator(f, ctx)
    y = y_c_operator(f, ctx)
    assert x == d_c_operator(u_operator(f, 7), ctx)
    assert y == u_operator(d_c_operator(f, ctx), 7)


def test_k_ladder():
    assert [k_value(17, j) for j in (1, 2, 3)] == [76, 140, 2316]
    assert k_value(5, 2) == 260
    assert k_value(7, 2) == 156
    assert k_ladder(17, 3).values == (76, 140, 2316)
    assert r_weight(17, 2, 2) == 140
    assert r_weight(17, 4, 1) == engine.even_weight(17, 1)


def test_offsets():
    assert r_offset(17, 0) == 1
    assert r_offset(5, 1) == 5
    assert r_offset(17, 1) == 6 and r_offset(17, 3) == 6
    assert r_offset(17, 2) == 1


def test_planner_is_exact_count():
    for ell, b in ((5, 1), (7, 2), (13, 3)):
        for path in (OPERATOR, EXTRACT):
            plan = plan_precision(ell, b, 20, path)
            f = r_series(RSeriesRequest(ell, b, 1, 20, path))
            assert f.prec == 20
            assert plan.upstream > 0


def test_r_series_examples():
    f = r_series(RSeriesRequest(5, 1, 3, 60))
    g = series_pow(delta_series(70, Zmod(125)), 5) * 5
    assert f.agrees(g)
    r0 = r_series(RSeriesRequest(17, 0, 0, 10))
    assert r0.offset == 1 and r0.ring == ZZ
    r2 = r_series(RSeriesRequest(17, 2, 1, 30))
    assert r2.agrees(delta_series(40, Zmod(17)) * 11)
    assert match_level1_form(r2, 12).coords == (11,)


@pytest.mark.parametrize("ell", [5, 7, 11, 13, 17])
@pytest.mark.parametrize("b", [0, 1, 2, 3])
def test_paths_agree(ell, b):
    for m in (1, 2):
        op = r_series(RSeriesRequest(ell, b, m, 30, OPERATOR))
        ex = r_series(RSeriesRequest(ell, b, m, 30, EXTRACT))
        assert op == ex


@pytest.mark.parametrize("ell,b", [(5, 1), (7, 2), (13, 1), (17, 3), (17, 2)])
def test_r_equals_b_times_eta_power(ell, b):
    ctx = make_context(ell)
    R = Zmod(ell**2)
    r = r_series(RSeriesRequest(ell, b, 2, 25))
    B = b_series_from_r(r, b, ctx)
    # the coefficients of B are b_l on the progression
    vals = b_values(ell, b, B.prec, R)
    assert B.to_list() == vals
    delta = ell if b % 2 else 1
    back = series_mul(B, EtaQuotient(delta, {delta: ctx.c}).expand(B.prec, R))
    assert back.realign(r.offset24).agrees(r)


def test_b_progression_index():
    assert b_coefficient_index(17, 1, 0) == 5
    assert [b_coefficient_index(17, 3, n) for n in range(3)] == [1637, 6550, 11463]
    B = b_series_from_r(r_series(RSeriesRequest(17, 1, 1, 10)), 1, 17)
    assert B.offset24 == 8 and B.to_list()[0] == 7
    B2 = b_series_from_r(r_series(RSeriesRequest(17, 2, 1, 10)), 2, 17)
    assert B2.offset24 == 24 - 8


def test_level1_lift_matches_direct():
    for ell, b, m in ((17, 3, 1), (13, 2, 1), (7, 3, 2)):
        lift, info = r_series_info(RSeriesRequest(ell, b, m, 40, LEVEL1))
        direct = r_series(RSeriesRequest(ell, b, m, 40, EXTRACT))
        assert lift == direct
        assert info.path == LEVEL1 and info.lifts
        assert info.status == VERIFIED_TO_STURM


def test_auto_falls_back_to_lift():
    f, info = r_series_info(RSeriesRequest(17, 3, 1, 20), max_upstream=5000)
    assert info.path == LEVEL1
    assert f == r_series(RSeriesRequest(17, 3, 1, 20, EXTRACT))


def test_insufficient_precision_names_window():
    with pytest.raises(InsufficientPrecision) as e:
        r_series(RSeriesRequest(17, 3, 0, 20), max_upstream=1000)
    assert e.value.required > 1000


def test_cancellation_hook():
    engine.clear_caches()
    seen = []

    def hook(stage, done, total):
        seen.append(stage)
        return False
    with pytest.raises(Cancelled):
        r_series(RSeriesRequest(13, 3, 1, 15, OPERATOR), hook=hook)
    assert seen


def test_request_validation():
    with pytest.raises(ValueError):
        RSeriesRequest(17, 1, 1, 0)
    with pytest.raises(ValueError):
        RSeriesRequest(17, 1, 1, 10, "bogus")
    with pytest.raises(ValueError):
        RSeriesRequest(17, 1, 0, 10, LEVEL1)
    assert RSeriesRequest(17, 1).path == AUTO


def test_rinfo_default():
    assert RInfo(OPERATOR).status == VERIFIED_TO_STURM


def test_e_ell_minus_one_lifting():
    # E_{l-1}^(l^(j-1)) = 1 mod l^j, j <= 3
    for ell in (5, 7):
        for j in (1, 2, 3):
            R = Zmod(ell**j)
            E = eisenstein_level1(ell - 1, 60, R)
            assert series_pow(E, ell ** (j - 1)).to_list() == [1] + [0] * 59
