"""Level-1 modular forms: E_k, Delta, dimensions, Miller bases, and congruence matching.

Everything here works either exactly (ZZ/QQ) or in Z/l^m.  Matching a q-series
against a level-1 space is an echelon read-off followed by a check of every
remaining known coefficient; there is no fitting.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import InsufficientPrecision, NoMatch, NotFoundBelow
from .eta import eta
from .series import (
    QQ,
    ZZ,
    FracQSeries,
    series_mul,
    series_pow,
    to_rationals,
)

VERIFIED_TO_STURM = "VerifiedToSturm"
DETERMINED_HEURISTIC = "DeterminedHeuristic"
NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """B_k with B_1 = -1/2 (so t/(e^t - 1) = sum B_k t^k / k!)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 1:
        return Fraction(-1, 2)
    p, q = mpmath.bernfrac(k)
    return Fraction(int(p), int(q))


def dim_level1(k: int, cuspidal: bool = False) -> int:
    if k < 0 or k % 2:
        return 0
    if k == 0:
        return 0 if cuspidal else 1
    if k == 2:
        return 0
    d = k // 12 + (0 if k % 12 == 2 else 1)
    return d - 1 if cuspidal else d


def _power_sum_sieve(n: int, power: int, ring):
    """sigma_power(j) for 0 <= j < n, in ``ring`` (residues use modular pow)."""
    if ring.is_residue:
        M = ring.modulus
        sig = [0] * n
        for d in range(1, n):
            p = pow(d, power, M)
            for j in range(d, n, d):
                sig[j] += p
        return [s % M for s in sig]
    sig = [0] * n
    for d in range(1, n):
        p = d**power
        for j in range(d, n, d):
            sig[j] += p
    return sig


def eisenstein_level1(k: int, prec: int, ring=QQ) -> FracQSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, normalized to constant term 1."""
    if k < 4 or k % 2:
        raise ValueError("E_k needs even k >= 4")
    factor = -Fraction(2 * k) / bernoulli_number(k)
    sig = _power_sum_sieve(prec, k - 1, ring)
    if ring.kind == "integer":
        if factor.denominator != 1:
            raise ValueError(f"E_{k} does not have integer coefficients")
        factor = factor.numerator
    f = ring(factor)
    coeffs = [1] + [f * s for s in sig[1:]]
    return FracQSeries.from_coeffs(coeffs[:prec], ring)


def delta_series(prec: int, ring=ZZ) -> FracQSeries:
    """Delta = eta^24 as an integral-exponent series known on [0, prec)."""
    if prec < 2:
        return FracQSeries.from_coeffs([0] * prec, ring)
    return eta(1, 24).expand(prec - 1, ring).realign(0)


@dataclass(frozen=True)
class MillerBasis:
    weight: int
    cuspidal: bool
    prec: int
    ring: object
    forms: tuple

    @property
    def dim(self) -> int:
        return len(self.forms)

    @property
    def first_exponent(self) -> int:
        return 1 if self.cuspidal else 0

    def combination(self, coords) -> FracQSeries:
        acc = FracQSeries.from_coeffs([], self.ring, prec=self.prec)
        for c, f in zip(coords, self.forms):
            if c:
                acc = acc + f * c
        return acc


class _PowerCache:
    """Successive powers of one series, built multiplicatively."""

    def __init__(self, base: FracQSeries):
        self.powers = [FracQSeries.one(base.prec, base.ring), base]

    def __getitem__(self, e: int) -> FracQSeries:
        while len(self.powers) <= e:
            self.powers.append(series_mul(self.powers[-1], self.powers[1]))
        return self.powers[e]


def _e4_e6_exponents(w: int):
    """(a, b) with 4a + 6b = w, b in {0, 1}."""
    if w % 4 == 0:
        return w // 4, 0
    return (w - 6) // 4, 1


_basis_cache: dict = {}
_basis_locks: dict = {}
_registry_lock = threading.Lock()


def miller_basis(k: int, cuspidal: bool, prec: int, ring=ZZ) -> MillerBasis:
    """Echelon integral basis f_i = q^i + O(q^(d+i0)) of the level-1 space.

    Built from monomials Delta^j E4^a E6^b (leading term q^j, coefficient 1),
    then back-substituted so each form vanishes at the other pivot exponents.
    Memoized per (k, cuspidal, prec, ring); construction is serialized per key.
    """
    key = (k, bool(cuspidal), prec, ring)
    with _registry_lock:
        if key in _basis_cache:
            return _basis_cache[key]
        lock = _basis_locks.setdefault(key, threading.Lock())
    with lock:
        if key not in _basis_cache:
            _basis_cache[key] = _build_miller(k, bool(cuspidal), prec, ring)
        return _basis_cache[key]


def _build_miller(k, cuspidal, prec, ring) -> MillerBasis:
    d = dim_level1(k, cuspidal)
    i0 = 1 if cuspidal else 0
    if d == 0:
        return MillerBasis(k, cuspidal, prec, ring, ())
    if prec <= d + i0 - 1:
        raise InsufficientPrecision(f"Miller basis of weight {k} needs prec > {d + i0 - 1}",
                                    required=d + i0)
    if k == 0:
        return MillerBasis(k, cuspidal, prec, ring, (FracQSeries.one(prec, ring),))
    work = ring if ring.is_residue else ZZ
    e4 = _PowerCache(eisenstein_level1(4, prec, work))
    e6 = eisenstein_level1(6, prec, work)
    delta = _PowerCache(delta_series(prec, work))
    gens = []
    for j in range(i0, i0 + d):
        a, b = _e4_e6_exponents(k - 12 * j)
        g = series_mul(delta[j], e4[a])
        if b:
            g = series_mul(g, e6)
        gens.append(g)
    forms = [None] * d
    for i in reversed(range(d)):
        f = gens[i]
        for j in range(i + 1, d):
            c = f[i0 + j]
            if c:
                f = f - forms[j] * c
        forms[i] = f
    if ring.kind == "rational":
        forms = [to_rationals(f) for f in forms]
    return MillerBasis(k, cuspidal, prec, ring, tuple(forms))


def sturm_target(k: int, ell: int) -> int:
    """Coefficient count for the level-l Sturm window used on level-l objects."""
    return math.ceil(Fraction(k * (ell + 1), 12)) + 1


@dataclass(frozen=True)
class MatchResult:
    weight: int
    cuspidal: bool
    coords: tuple
    status: str
    window: int
    sturm_target: int

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)


def match_level1_form(f: FracQSeries, k: int, cuspidal: bool = True) -> MatchResult:
    """Find c_i (mod l^m) with f == sum c_i f_i on every known coefficient.

    ``f`` must be an integral-exponent residue series; the window is the run
    of known coefficients from q^0 (zeros below the offset count as known).
    """
    ring = f.ring
    if not ring.is_residue:
        raise TypeError("match_level1_form needs a residue-ring series")
    if f.offset < 0:
        raise NoMatch("series has a pole at infinity", exponent=f.offset)
    window = f.known_to
    d = dim_level1(k, cuspidal)
    i0 = 1 if cuspidal else 0
    if window < i0 + d:
        raise InsufficientPrecision(
            f"need coefficients up to q^{i0 + d - 1} to match weight {k}", required=i0 + d)
    basis = miller_basis(k, cuspidal, window, ring)
    coords = tuple(f[i0 + i] for i in range(d))
    recon = basis.combination(coords) if d else FracQSeries.from_coeffs([], ring, prec=window)
    diff = (f.realign(0) if f.offset > 0 else f) - recon
    if not diff.is_zero():
        e = diff.offset + diff.leading_index()
        raise NoMatch(f"no form in {'S' if cuspidal else 'M'}_{k} matches: "
                      f"mismatch at q^{e}", exponent=e)
    target = sturm_target(k, ring.prime)
    status = VERIFIED_TO_STURM if window >= target else DETERMINED_HEURISTIC
    return MatchResult(k, cuspidal, coords, status, window, target)


def filtration(f: FracQSeries, k0: int, k_max: int):
    """Least k = k0 (mod l-1), k <= k_max, with f congruent mod l to a form in M_k.

    Returns NEG_INF for f == 0; raises NotFoundBelow if nothing up to k_max works.
    """
    ring = f.ring
    if ring.exponent != 1:
        raise TypeError("filtration is defined modulo l")
    if f.is_zero():
        return NEG_INF
    step = ring.prime - 1
    k = k0 % step
    while k <= k_max:
        if k % 2 == 0 and k != 2:
            try:
                match_level1_form(f, k, cuspidal=False)
                return k
            except NoMatch:
                pass
        k += step
    raise NotFoundBelow(k_max)


def delta_eisenstein_coords(f: FracQSeries, k: int, cuspidal: bool = True):
    """Coordinates of f in the triangular basis Delta^a E_{k-12a} (E_0 = 1).

    This is the human rendering used for congruence tables; it is solved by
    forward substitution and checked on the whole known window.
    """
    ring = f.ring
    d = dim_level1(k, cuspidal)
    i0 = 1 if cuspidal else 0
    window = f.known_to
    if window < i0 + d:
        raise InsufficientPrecision(f"need q^{i0 + d - 1}", required=i0 + d)
    delta = _PowerCache(delta_series(window, ring))
    residual = f.realign(0) if f.offset > 0 else f
    coords = []
    for a in range(i0, i0 + d):
        c = residual[a]
        coords.append(c)
        if c:
            residual = residual - delta_e_monomial(a, k, window, ring, delta) * c
    if not residual.is_zero():
        e = residual.offset + residual.leading_index()
        raise NoMatch(f"Delta/E expansion of weight {k} fails at q^{e}", exponent=e)
    return list(range(i0, i0 + d)), coords


def delta_e_monomial(a: int, k: int, prec: int, ring, delta_powers=None) -> FracQSeries:
    w = k - 12 * a
    dp = delta_powers[a] if delta_powers is not None else series_pow(delta_series(prec, ring), a)
    if w == 0:
        return dp
    return series_mul(dp, eisenstein_level1(w, prec, ring))


def render_delta_e(exponents, coords, k: int) -> str:
    terms = []
    for a, c in zip(exponents, coords):
        if not c:
            continue
        w = k - 12 * a
        mono = "Delta" if a == 1 else f"Delta^{a}"
        if a == 0:
            mono = ""
        if w:
            mono = f"{mono}*E_{w}" if mono else f"E_{w}"
        terms.append(f"{c}*{mono}" if mono else str(c))
    return " + ".join(terms) if terms else "0"


def lowest_weight_form(f: FracQSeries, k: int, cuspidal: bool = True):
    """Smallest k' = k (mod phi(l^m)) with f congruent to a form of weight k'.

    Uses E_{l-1}^(l^(m-1)) = 1 (mod l^m), so a weight-k' form is also a weight-k
    form.  Returns (k', exponents, coords) in the Delta/E basis of weight k'.
    """
    ring = f.ring
    if not ring.is_residue:
        raise TypeError("lowest_weight_form needs a residue-ring series")
    step = ring.modulus // ring.prime * (ring.prime - 1)
    w = k % step
    while w < k:
        if w % 2 == 0 and w != 2 and (w >= 12 or not cuspidal):
            try:
                exps, coords = delta_eisenstein_coords(f, w, cuspidal)
                return w, exps, coords
            except (NoMatch, InsufficientPrecision):
                pass
        w += step
    exps, coords = delta_eisenstein_coords(f, k, cuspidal)
    return k, exps, coords
