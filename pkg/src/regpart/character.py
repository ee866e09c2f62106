"""The quadratic character mod l and the objects built from it.

Generalized Bernoulli numbers, the weight-(l-1)/2 Eisenstein pair E_chi and
F_chi, the rational constant C_l^2, h_chi = E_chi - C_l^2 F_chi, eta-quotient
modularity data and l-adic valuations.  C_l itself is irrational and is never
formed; only its square enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import NotPrime, PrimeTooSmall
from .forms import bernoulli_number
from .series import QQ, FracQSeries, is_prime


def c_of(ell: int) -> int:
    return 24 * (-(-(ell - 1) // 24)) - (ell - 1)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    # Jacobi symbol by quadratic reciprocity
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class CharacterContext:
    ell: int
    c: int
    v_of_ell: int

    def chi(self, d: int) -> int:
        return legendre(d, self.ell)

    @property
    def k_chi(self) -> int:
        """Weight (l-1)/2 of E_chi."""
        return (self.ell - 1) // 2

    @property
    def epsilon(self) -> int:
        return 1 if self.ell % 4 == 1 else -1


def make_context(ell: int) -> CharacterContext:
    if not is_prime(ell):
        raise NotPrime(f"{ell} is not prime")
    if ell < 5:
        raise PrimeTooSmall(f"l must be >= 5, got {ell}")
    return CharacterContext(ell, c_of(ell), 2 if ell % 4 == 1 else 1)


def _ctx(x) -> CharacterContext:
    return x if isinstance(x, CharacterContext) else make_context(int(x))


@lru_cache(maxsize=None)
def _gen_bernoulli_poly(k: int, ell: int) -> Fraction:
    # B_{k,chi} = l^(k-1) sum_a chi(a) B_k(a/l)
    total = Fraction(0)
    for a in range(1, ell):
        ch = legendre(a, ell)
        x = Fraction(a, ell)
        total += ch * sum(math.comb(k, j) * bernoulli_number(j) * x ** (k - j)
                          for j in range(k + 1))
    return total * ell ** (k - 1)


@lru_cache(maxsize=None)
def _gen_bernoulli_series(K: int, ell: int) -> tuple:
    """B_{0,chi} .. B_{K,chi} by dividing out the generating function.

    sum chi(a) t e^(at) / (e^(lt) - 1): after cancelling t the numerator has
    coefficients S_j / j! (S_j = sum chi(a) a^j) and the denominator l^(j+1)/(j+1)!.
    """
    chis = [legendre(a, ell) for a in range(ell)]
    num = [Fraction(sum(chis[a] * a**j for a in range(1, ell)), math.factorial(j))
           for j in range(K + 1)]
    den = [Fraction(ell ** (j + 1), math.factorial(j + 1)) for j in range(K + 1)]
    q = []
    for n in range(K + 1):
        acc = num[n] - sum(den[i] * q[n - i] for i in range(1, n + 1))
        q.append(acc / den[0])
    return tuple(qn * math.factorial(n) for n, qn in enumerate(q))


def gen_bernoulli(k: int, ctx, method: str = "polynomial") -> Fraction:
    """Generalized Bernoulli number B_{k,chi} for the Legendre character mod l."""
    ctx = _ctx(ctx)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if method == "polynomial":
        return _gen_bernoulli_poly(k, ctx.ell)
    if method == "series":
        return _gen_bernoulli_series(k, ctx.ell)[k]
    raise ValueError(f"unknown method {method!r}")


def _twisted_sum(prec: int, k: int, ell: int, ring, twist_divisor: bool):
    """Coefficients sum_{d|n} chi(d) d^(k-1) (twist_divisor) or chi(d) (n/d)^(k-1)."""
    M = ring.modulus if ring.is_residue else None
    out = [0] * prec
    powers = [0] + [pow(e, k - 1, M) if M else e ** (k - 1) for e in range(1, prec)]
    for d in range(1, prec):
        ch = legendre(d, ell)
        if not ch:
            continue
        if twist_divisor:
            p = ch * powers[d]
            for n in range(d, prec, d):
                out[n] += p
        else:
            for e, n in enumerate(range(d, prec, d), start=1):
                out[n] += ch * powers[e]
    if M:
        out = [x % M for x in out]
    return out


def eisenstein_E_chi(k: int, ctx, prec: int, ring=QQ) -> FracQSeries:
    """E_{k,chi} = 1 - (2k/B_{k,chi}) sum (sum_{d|n} chi(d) d^(k-1)) q^n."""
    ctx = _ctx(ctx)
    B = gen_bernoulli(k, ctx)
    if B == 0:
        raise ValueError(f"B_{{{k},chi}} vanishes: parity of k does not match chi(-1)")
    factor = ring(-Fraction(2 * k) / B)
    sums = _twisted_sum(prec, k, ctx.ell, ring, True)
    coeffs = [1] + [factor * s for s in sums[1:]]
    return FracQSeries.from_coeffs(coeffs[:prec], ring)


def eisenstein_F_chi(k: int, ctx, prec: int, ring=QQ) -> FracQSeries:
    """F_{k,chi} = sum n^(k-1) (sum_{d|n} chi(d) d^(1-k)) q^n, integral."""
    ctx = _ctx(ctx)
    sums = _twisted_sum(prec, k, ctx.ell, ring, False)
    return FracQSeries.from_coeffs(sums, ring)


def c_ell_squared(ctx) -> Fraction:
    ctx = _ctx(ctx)
    ell = ctx.ell
    B = gen_bernoulli(ctx.k_chi, ctx)
    return ctx.epsilon * Fraction((ell - 1) ** 2 * ell ** ((ell - 3) // 2)) / (B * B)


def e_chi(ctx, prec: int, ring=QQ) -> FracQSeries:
    ctx = _ctx(ctx)
    return eisenstein_E_chi(ctx.k_chi, ctx, prec, ring)


def h_chi(ctx, prec: int, ring=QQ) -> FracQSeries:
    """E_chi - C_l^2 F_chi; congruent to 1 mod l."""
    ctx = _ctx(ctx)
    k = ctx.k_chi
    E = eisenstein_E_chi(k, ctx, prec, ring)
    F = eisenstein_F_chi(k, ctx, prec, ring)
    return E - F * ring(c_ell_squared(ctx))


# valuations

def v_rational(x, ell: int):
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % ell == 0:
        n //= ell
        v += 1
    while d % ell == 0:
        d //= ell
        v -= 1
    return v


def ell_valuation(x, ctx, normalization: str = "plain"):
    """l-adic valuation of a rational or the minimum over a series' coefficients.

    ``paper`` scales by v_of_ell, the valuation of l at the prime above l in the
    quadratic field the constants C_l live in.  Zero gives math.inf.
    """
    ctx = _ctx(ctx)
    if normalization not in ("plain", "paper"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if isinstance(x, FracQSeries):
        if x.ring.is_residue:
            raise TypeError("valuation needs exact coefficients")
        v = min((v_rational(c, ctx.ell) for c in x.coeffs), default=math.inf)
    else:
        v = v_rational(x, ctx.ell)
    if normalization == "paper" and v != math.inf:
        v *= ctx.v_of_ell
    return v


# eta-quotient modularity data

def _squarefree_signed(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, p = 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
        p += 1
    return sign * out * n


@dataclass(frozen=True)
class EtaQuotientMeta:
    level: int
    weight: Fraction
    character_top: int | None
    cusp_orders: dict
    valid: bool

    def character(self, d: int) -> int:
        """Nebentypus value at d coprime to the level, via the Kronecker symbol."""
        if self.character_top is None:
            raise ValueError("half-integral weight: no Kronecker descriptor")
        if math.gcd(d, self.level) != 1:
            return 0
        return kronecker(self.character_top, d)


def cusp_order(eq, d: int) -> Fraction:
    """Order of vanishing at a cusp c/d (d | N), in the local uniformizer there."""
    N = eq.level
    total = Fraction(0)
    for delta, r in eq.exponents.items():
        g = math.gcd(d, delta)
        total += Fraction(g * g * r, math.gcd(d, N // d) * d * delta)
    return Fraction(N, 24) * total


def eta_quotient_meta(eq) -> EtaQuotientMeta:
    N = eq.level
    weight = Fraction(eq.weight2, 2)
    top = None
    if weight.denominator == 1:
        prod = 1
        for delta, r in eq.exponents.items():
            prod *= delta ** abs(r)
        top = _squarefree_signed((-1) ** int(weight) * prod)
    orders = {d: cusp_order(eq, d) for d in range(1, N + 1) if N % d == 0}
    valid = (sum(d * r for d, r in eq.exponents.items()) % 24 == 0
             and sum(N // d * r for d, r in eq.exponents.items()) % 24 == 0)
    return EtaQuotientMeta(N, weight, top, orders, valid)
