import math
from fractions import Fraction
from math import comb

import pytest

from oracles import bernoulli_recursive, legendre as legendre_brute
from regpart.character import (
    c_ell_squared,
    c_of,
    cusp_order,
    e_chi,
    eisenstein_E_chi,
    eisenstein_F_chi,
    ell_valuation,
    eta_quotient_meta,
    gen_bernoulli,
    h_chi,
    kronecker,
    legendre,
    make_context,
)
from regpart.engine import phi_quotient, r0_quotient
from regpart.errors import NotPrime, PrimeTooSmall
from regpart.eta import EtaQuotient, eta
from regpart.forms import delta_series
from regpart.series import FracQSeries, Zmod, reduce_mod

PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31]


def bernoulli_poly(k, x):
    return sum(comb(k, j) * bernoulli_recursive(j) * x ** (k - j) for j in range(k + 1))


def gen_bernoulli_oracle(k, ell):
    # B_{k,chi} = f^(k-1) sum_{a=1}^{f} chi(a) B_k(a/f), with B_1 = -1/2 convention
    return ell ** (k - 1) * sum(legendre_brute(a, ell) * bernoulli_poly(k, Fraction(a, ell))
                                for a in range(1, ell + 1))


def test_context_values():
    assert make_context(17).c == 8
    assert make_context(5).c == 20
    assert make_context(13).c == 12
    for ell in PRIMES + [37, 41, 73, 97]:
        c = c_of(ell)
        assert 0 <= c < 24 and c % 2 == 0 and (c + ell - 1) % 24 == 0
    with pytest.raises(NotPrime):
        make_context(15)
    with pytest.raises(PrimeTooSmall):
        make_context(3)


@pytest.mark.parametrize("ell", [5, 7, 13, 17])
def test_chi_multiplicative(ell):
    ctx = make_context(ell)
    assert ctx.chi(1) == 1
    for a in range(0, 3 * ell):
        assert (ctx.chi(a) == 0) == (a % ell == 0)
        assert ctx.chi(a) == legendre_brute(a, ell)
        for b in range(0, 2 * ell):
            assert ctx.chi(a * b) == ctx.chi(a) * ctx.chi(b)


def test_kronecker_matches_legendre_at_odd_primes():
    for p in (5, 7, 11, 13):
        for a in range(-20, 20):
            assert kronecker(a, p) == legendre(a, p)


def test_gen_bernoulli_19_9():
    ctx = make_context(19)
    B = gen_bernoulli(9, ctx)
    assert Fraction(-18) / B == Fraction(19, 3708443635)
    assert B == gen_bernoulli_oracle(9, 19)


def test_gen_bernoulli_parity_vanishing():
    ctx = make_context(17)      # chi even
    for k in (1, 3, 5, 7):
        assert gen_bernoulli(k, ctx) == 0
    ctx = make_context(19)      # chi odd
    for k in (2, 4, 6):
        assert gen_bernoulli(k, ctx) == 0


@pytest.mark.parametrize("ell", [5, 7, 11, 13])
def test_gen_bernoulli_against_polynomial_oracle(ell):
    ctx = make_context(ell)
    for k in range(1, 12):
        assert gen_bernoulli(k, ctx) == gen_bernoulli_oracle(k, ell)


@pytest.mark.parametrize("ell", PRIMES)
def test_half_weight_bernoulli_valuation(ell):
    ctx = make_context(ell)
    assert ell_valuation(gen_bernoulli(ctx.k_chi, ctx), ctx) == -1


def test_eisenstein_19_9():
    ctx = make_context(19)
    F = eisenstein_F_chi(9, ctx, 6)
    assert F.to_list()[1:] == [1, 255, 6560, 65281, 390626]
    E = eisenstein_E_chi(9, ctx, 5)
    scale = Fraction(19, 3708443635)
    assert E.to_list() == [1, scale, -255 * scale, -6560 * scale, 65281 * scale]


@pytest.mark.parametrize("ell", [5, 7, 13])
def test_f_coefficients_by_divisor_sums(ell):
    ctx = make_context(ell)
    k = ctx.k_chi
    F = eisenstein_F_chi(k, ctx, 40)
    for n in range(1, 40):
        direct = n ** (k - 1) * sum(Fraction(legendre_brute(d, ell), d ** (k - 1))
                                    for d in range(1, n + 1) if n % d == 0)
        assert F[n] == direct
    assert F[1] == 1
    assert F[ell] == ell ** (k - 1)


@pytest.mark.parametrize("ell", PRIMES)
def test_e_chi_and_h_chi_are_one_mod_ell(ell):
    ctx = make_context(ell)
    R = Zmod(ell)
    one = [1] + [0] * 99
    assert reduce_mod(e_chi(ctx, 100), ell).to_list() == one
    h = h_chi(ctx, 100)
    assert h[0] == 1
    assert reduce_mod(h, ell).to_list() == one
    assert h_chi(ctx, 100, R).to_list() == one


@pytest.mark.parametrize("ell", PRIMES)
def test_c_squared_valuation(ell):
    ctx = make_context(ell)
    assert ell_valuation(c_ell_squared(ctx), ctx) == (ell + 1) // 2


def test_valuations():
    ctx = make_context(17)
    assert ell_valuation(17, ctx) == 1
    assert ell_valuation(17, ctx, "paper") == 2
    assert ell_valuation(19, make_context(19), "paper") == 1
    zero = FracQSeries.from_coeffs([], prec=5)
    assert ell_valuation(zero, ctx) == math.inf
    five_delta5 = delta_series(30) ** 5 * 5
    assert ell_valuation(five_delta5, make_context(5)) == 1


def test_eta_meta_delta_and_r0():
    m = eta_quotient_meta(eta(1, 24))
    assert m.weight == 12 and m.cusp_orders[1] == 1 and m.valid
    for ell in (5, 13, 17):
        ctx = make_context(ell)
        meta = r0_quotient(ctx).meta()
        assert meta.weight == Fraction(ctx.c, 2)
        assert meta.character_top == (-1) ** (ctx.c // 2) * ell


def test_phi_cusp_orders():
    meta = phi_quotient(17).meta()
    assert meta.weight == 0
    assert meta.cusp_orders == {1: -12, 17: 0, 289: 12}
    assert meta.cusp_orders[289] == (17**2 - 1) // 24
    # order at infinity equals the leading exponent of the expansion
    assert phi_quotient(17).expand(5).offset24 == 24 * 12
    assert cusp_order(EtaQuotient(289, {289: 1, 1: -1}), 289) == 12
