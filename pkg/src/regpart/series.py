"""Truncated q-series over Z, Q and Z/l^m.

Exponents are tracked in units of 1/24 so eta products such as
``q^(1/24) * prod(1 - q^n)`` stay exact.  A series stores its lowest exponent
``offset24`` (numerator over 24) and a run of known coefficients, one per unit
step in the exponent; everything past the run is unknown and is never
invented.  Coefficients live in numpy arrays: int64 residues for Z/l^m (the
hot path, driven by the compiled kernels) and Python objects for exact Z/Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import (
    DenominatorNotCoprime,
    IncompatibleOffsets,
    InsufficientPrecision,
    InvalidModulus,
    NonIntegralExponents,
    NonUnitLeadingCoefficient,
    RingMismatch,
)

INTEGER = "integer"
RATIONAL = "rational"
RESIDUE = "residue"

MAX_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(n: int):
    """Return (p, m) with n == p**m, or None if n is not a prime power."""
    if n < 2:
        return None
    p = 2
    while p * p <= n and n % p:
        p += 1
    if n % p:
        p = n
    m, r = 0, n
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


@dataclass(frozen=True)
class CoefficientRing:
    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == RESIDUE:
            pm = prime_power(self.modulus or 0)
            if pm is None or pm[0] < 5:
                raise InvalidModulus(
                    f"residue modulus must be l^m with l >= 5 prime, got {self.modulus}")
            if self.modulus >= MAX_MODULUS:
                raise InvalidModulus(f"modulus {self.modulus} too large for int64 kernels")
        elif self.kind in (INTEGER, RATIONAL):
            if self.modulus is not None:
                raise InvalidModulus("exact rings carry no modulus")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @property
    def is_residue(self) -> bool:
        return self.kind == RESIDUE

    @property
    def prime(self) -> int | None:
        return prime_power(self.modulus)[0] if self.is_residue else None

    @property
    def exponent(self) -> int | None:
        return prime_power(self.modulus)[1] if self.is_residue else None

    @property
    def dtype(self):
        return np.int64 if self.is_residue else object

    def __str__(self):
        if self.kind == INTEGER:
            return "ZZ"
        if self.kind == RATIONAL:
            return "QQ"
        return f"Z/{self.modulus}"

    def __call__(self, x):
        """Coerce a scalar (int or Fraction) into this ring."""
        if self.kind == RATIONAL:
            return Fraction(x)
        if isinstance(x, Fraction) or not isinstance(x, (int, np.integer)):
            x = Fraction(x)
            if x.denominator == 1:
                x = x.numerator
        if self.kind == INTEGER:
            if isinstance(x, Fraction):
                raise TypeError(f"{x} is not an integer")
            return int(x)
        M = self.modulus
        if isinstance(x, Fraction):
            if math.gcd(x.denominator, self.prime) != 1:
                raise DenominatorNotCoprime(f"{x} has denominator divisible by {self.prime}")
            return x.numerator * pow(x.denominator, -1, M) % M
        return int(x) % M

    def is_unit(self, x) -> bool:
        if self.kind == INTEGER:
            return x in (1, -1)
        if self.kind == RATIONAL:
            return x != 0
        return int(x) % self.prime != 0

    def inverse(self, x):
        if not self.is_unit(x):
            raise NonUnitLeadingCoefficient(f"{x} is not a unit in {self}")
        if self.kind == INTEGER:
            return int(x)
        if self.kind == RATIONAL:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.modulus)

    def array(self, values, n=None) -> np.ndarray:
        values = list(values)
        if n is not None:
            values = values[:n] + [0] * max(0, n - len(values))
        if self.is_residue:
            return np.array([self(v) for v in values], dtype=np.int64).reshape(-1)
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = self(v)
        return out

    def zeros(self, n: int) -> np.ndarray:
        if self.is_residue:
            return np.zeros(n, dtype=np.int64)
        out = np.empty(n, dtype=object)
        out[:] = 0 if self.kind == INTEGER else Fraction(0)
        return out


ZZ = CoefficientRing(INTEGER)
QQ = CoefficientRing(RATIONAL)


def Zmod(modulus: int) -> CoefficientRing:
    return CoefficientRing(RESIDUE, int(modulus))


def residue_ring(ell: int, m: int) -> CoefficientRing:
    if m < 1:
        raise InvalidModulus("modulus exponent must be >= 1")
    return Zmod(ell**m)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class FracQSeries:
    """Immutable truncated series sum_i coeffs[i] * q^((offset24 + 24 i)/24)."""

    __slots__ = ("ring", "offset24", "coeffs")

    def __init__(self, ring: CoefficientRing, offset24: int, coeffs: np.ndarray):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "offset24", int(offset24))
        if coeffs.dtype != ring.dtype:
            coeffs = ring.array(coeffs)
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("FracQSeries is immutable")

    @classmethod
    def from_coeffs(cls, coeffs, ring=ZZ, offset24=0, prec=None):
        """Build from a coefficient list, padding with known zeros up to ``prec``."""
        return cls(ring, offset24, ring.array(coeffs, prec))

    @classmethod
    def from_terms(cls, terms: dict, prec: int, ring=ZZ, offset=0):
        """Integral-exponent series from {exponent: coeff}, known on [offset, offset+prec)."""
        arr = ring.zeros(prec)
        for e, c in terms.items():
            if offset <= e < offset + prec:
                arr[e - offset] = ring(c)
        return cls(ring, 24 * offset, arr)

    @classmethod
    def one(cls, prec: int, ring=ZZ):
        return cls.from_terms({0: 1}, prec, ring)

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    @property
    def known_to24(self) -> int:
        return self.offset24 + 24 * self.prec

    @property
    def is_integral_exponent(self) -> bool:
        return self.offset24 % 24 == 0

    @property
    def offset(self) -> int:
        """Lowest exponent, for integral-exponent series."""
        self._require_integral()
        return self.offset24 // 24

    @property
    def known_to(self) -> int:
        """First exponent whose coefficient is unknown (integral series)."""
        self._require_integral()
        return self.known_to24 // 24

    def _require_integral(self):
        if not self.is_integral_exponent:
            raise NonIntegralExponents(f"series has exponents in {self.offset24 % 24}/24 + Z")

    def __getitem__(self, n: int):
        """Coefficient of q^n (integral series); zeros below the offset are known."""
        i = n - self.offset
        if i < 0:
            return self.ring(0)
        if i >= self.prec:
            raise InsufficientPrecision(f"coefficient of q^{n} unknown (known to q^{self.known_to - 1})")
        return self.coeffs[i].item() if self.ring.is_residue else self.coeffs[i]

    def window(self, start: int, length: int) -> list:
        """Coefficients of q^start .. q^(start+length-1) as Python scalars."""
        if start + length > self.known_to:
            raise InsufficientPrecision(
                f"window [{start}, {start + length}) exceeds known range (to {self.known_to})",
                required=start + length)
        return [self[n] for n in range(start, start + length)]

    def to_list(self) -> list:
        return self.coeffs.tolist() if self.ring.is_residue else list(self.coeffs)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def is_zero(self) -> bool:
        return self.nnz == 0

    def leading_index(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if len(nz) else None

    def truncate(self, prec: int) -> FracQSeries:
        return FracQSeries(self.ring, self.offset24, self.coeffs[: max(0, prec)].copy())

    def normalize(self) -> FracQSeries:
        """Drop leading zero coefficients (the known-to point is unchanged)."""
        i = self.leading_index()
        if not i:
            return self
        return FracQSeries(self.ring, self.offset24 + 24 * i, self.coeffs[i:].copy())

    def realign(self, offset24: int) -> FracQSeries:
        """Re-express with a different lowest exponent, keeping the known-to point.

        Moving the offset up discards coefficients, which must be zero.
        """
        d = offset24 - self.offset24
        if d % 24:
            raise IncompatibleOffsets(f"cannot realign {self.offset24}/24 to {offset24}/24")
        d //= 24
        if d >= 0:
            if np.count_nonzero(self.coeffs[:d]):
                raise ValueError("realign would discard nonzero coefficients")
            return FracQSeries(self.ring, offset24, self.coeffs[d:].copy())
        return FracQSeries(self.ring, offset24,
                           np.concatenate([self.ring.zeros(-d), self.coeffs]))

    def mul_q_power(self, k24: int) -> FracQSeries:
        return FracQSeries(self.ring, self.offset24 + k24, self.coeffs.copy())

    def __eq__(self, other):
        if not isinstance(other, FracQSeries):
            return NotImplemented
        return (self.ring == other.ring and self.offset24 == other.offset24
                and self.prec == other.prec and bool(np.all(self.coeffs == other.coeffs)))

    def __hash__(self):
        return hash((self.ring, self.offset24, tuple(self.to_list())))

    def agrees(self, other: FracQSeries) -> bool:
        """Coefficientwise equality on the common known window."""
        d = series_sub(self, other)
        return d.is_zero()

    def __repr__(self):
        head = []
        for i, c in enumerate(self.to_list()[:8]):
            if c:
                e = Fraction(self.offset24 + 24 * i, 24)
                head.append(f"{c}*q^{e}")
        body = " + ".join(head) if head else "0"
        return f"FracQSeries({body} + O(q^{Fraction(self.known_to24, 24)}) over {self.ring})"

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_sub(self, other)

    def __neg__(self):
        return series_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, FracQSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return series_pow(self, e)


def _check_ring(f: FracQSeries, g: FracQSeries):
    if f.ring != g.ring:
        raise RingMismatch(f"ring mismatch: {f.ring} vs {g.ring}")


def _aligned(f: FracQSeries, g: FracQSeries):
    """Zero-pad both coefficient runs onto the common window [min offset, min known-to)."""
    _check_ring(f, g)
    if (f.offset24 - g.offset24) % 24:
        raise IncompatibleOffsets(
            f"offsets {f.offset24}/24 and {g.offset24}/24 differ by a non-integer exponent")
    lo = min(f.offset24, g.offset24)
    hi = min(f.known_to24, g.known_to24)
    n = max(0, (hi - lo) // 24)

    def pad(s):
        out = s.ring.zeros(n)
        start = (s.offset24 - lo) // 24
        take = max(0, min(s.prec, n - start))
        out[start:start + take] = s.coeffs[:take]
        return out

    return lo, pad(f), pad(g)


def series_add(f: FracQSeries, g: FracQSeries) -> FracQSeries:
    lo, a, b = _aligned(f, g)
    s = a + b
    if f.ring.is_residue:
        s %= f.ring.modulus
    return FracQSeries(f.ring, lo, s)


def series_sub(f: FracQSeries, g: FracQSeries) -> FracQSeries:
    lo, a, b = _aligned(f, g)
    s = a - b
    if f.ring.is_residue:
        s %= f.ring.modulus
    return FracQSeries(f.ring, lo, s)


def series_scale(f: FracQSeries, c) -> FracQSeries:
    c = f.ring(c)
    if f.ring.is_residue:
        return FracQSeries(f.ring, f.offset24, (f.coeffs * c) % f.ring.modulus)
    return FracQSeries(f.ring, f.offset24, f.coeffs * c)


def _sparse_terms(a: np.ndarray):
    idx = np.flatnonzero(a)
    return idx.astype(np.int64), a[idx]


def _mul_arrays(ring: CoefficientRing, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    if n <= 0:
        return ring.zeros(0)
    a, b = a[:n], b[:n]
    na, nb = np.count_nonzero(a), np.count_nonzero(b)
    if na > nb:
        a, b, na, nb = b, a, nb, na
    if ring.is_residue:
        M = ring.modulus
        period = _kernels.fold_period(M)
        if na * 4 <= n:
            idx, val = _sparse_terms(a)
            return _kernels.mul_sparse(np.ascontiguousarray(b), idx, np.ascontiguousarray(val),
                                       n, M, period)
        return _kernels.mul_dense(np.ascontiguousarray(a), np.ascontiguousarray(b), n, M, period)
    if na * 2 <= n:
        out = ring.zeros(n)
        for e in np.flatnonzero(a):
            out[e:] += a[e] * b[: n - e]
        return out
    out = np.convolve(a, b)[:n]
    if len(out) < n:
        out = np.concatenate([out, ring.zeros(n - len(out))])
    return out


def series_mul(f: FracQSeries, g: FracQSeries) -> FracQSeries:
    """Product; known length is the shorter of the two known runs."""
    _check_ring(f, g)
    n = min(f.prec, g.prec)
    return FracQSeries(f.ring, f.offset24 + g.offset24, _mul_arrays(f.ring, f.coeffs, g.coeffs, n))


def _div_arrays(ring: CoefficientRing, h: np.ndarray, d: np.ndarray, n: int) -> np.ndarray:
    """Solve g * d = h to n terms; d[0] must be a unit."""
    if n <= 0:
        return ring.zeros(0)
    d0 = d[0].item() if ring.is_residue else d[0]
    inv0 = ring.inverse(d0)
    h = h[:n]
    if len(h) < n:
        h = np.concatenate([h, ring.zeros(n - len(h))])
    idx, val = _sparse_terms(d[:n])
    if ring.is_residue:
        return _kernels.div_sparse(np.ascontiguousarray(h), idx, np.ascontiguousarray(val),
                                   inv0, ring.modulus)
    terms = list(zip(idx.tolist()[1:], list(val[1:])))
    g = ring.zeros(n)
    for i in range(n):
        acc = h[i]
        for e, v in terms:
            if e > i:
                break
            acc -= v * g[i - e]
        g[i] = acc * inv0
    return g


def series_div(f: FracQSeries, g: FracQSeries) -> FracQSeries:
    """f / g, with g's leading coefficient a unit.  Sparse divisors are cheap."""
    _check_ring(f, g)
    g = g.normalize()
    n = min(f.prec, g.prec)
    if g.prec == 0:
        raise NonUnitLeadingCoefficient("divisor has no known coefficients")
    return FracQSeries(f.ring, f.offset24 - g.offset24, _div_arrays(f.ring, f.coeffs, g.coeffs, n))


def series_inverse(f: FracQSeries, prec: int | None = None) -> FracQSeries:
    """1/f to ``prec`` terms (default: f's own known length)."""
    f = f.normalize()
    if f.prec == 0 or not f.ring.is_unit(_lead(f)):
        raise NonUnitLeadingCoefficient(f"leading coefficient of {f!r} is not a unit")
    n = f.prec if prec is None else min(prec, f.prec)
    one = f.ring.zeros(n)
    if n:
        one[0] = f.ring(1)
    return FracQSeries(f.ring, -f.offset24, _div_arrays(f.ring, one, f.coeffs, n))


def _lead(f: FracQSeries):
    return f.coeffs[0].item() if f.ring.is_residue else f.coeffs[0]


def series_pow(f: FracQSeries, e: int) -> FracQSeries:
    if e < 0:
        raise ValueError("negative powers: use series_inverse")
    result = FracQSeries.one(f.prec, f.ring)
    base = f
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    return result


def pentagonal_terms(n: int):
    """Exponents and signs of prod(1 - q^k) = sum (-1)^j q^(j(3j-1)/2) below q^n."""
    exps, signs = [0], [1]
    j = 1
    while True:
        a = j * (3 * j - 1) // 2
        if a >= n:
            break
        s = -1 if j & 1 else 1
        exps.append(a)
        signs.append(s)
        b = j * (3 * j + 1) // 2
        if b < n:
            exps.append(b)
            signs.append(s)
        j += 1
    return exps, signs


def euler_product(prec: int, ring=ZZ, dilation: int = 1) -> FracQSeries:
    """prod_{k>=1} (1 - q^(dilation*k)) to ``prec`` known coefficients, offset 0."""
    arr = ring.zeros(prec)
    exps, signs = pentagonal_terms(-(-prec // dilation))
    for e, s in zip(exps, signs):
        if e * dilation < prec:
            arr[e * dilation] = ring(s)
    return FracQSeries(ring, 0, arr)


def eta_expansion(dilation: int, prec: int, ring=ZZ) -> FracQSeries:
    """eta(dilation * z) = q^(dilation/24) prod(1 - q^(dilation k)), ``prec`` coefficients."""
    if prec < 1:
        raise ValueError("prec must be >= 1")
    return euler_product(prec, ring, dilation).mul_q_power(dilation)


def extract_progression(f: FracQSeries, a: int, M: int) -> FracQSeries:
    """sum_n c(M n + a) q^n, keeping exactly the coefficients that are known."""
    if M < 1:
        raise ValueError("M must be positive")
    e0, top = f.offset, f.known_to
    n0 = -((a - e0) // M)              # ceil((e0 - a) / M)
    n1 = -((a - top) // M)             # first n with M n + a >= top
    idx = [M * n + a - e0 for n in range(n0, max(n0, n1))]
    return FracQSeries(f.ring, 24 * n0, f.coeffs[idx].copy() if idx else f.ring.zeros(0))


def dilate(f: FracQSeries, M: int) -> FracQSeries:
    """q^n -> q^(M n).  The known window stretches: exponents up to M*known_to - 1."""
    if M == 1:
        return f
    n = (f.prec - 1) * M + 1 if f.prec else 0
    out = f.ring.zeros(n)
    out[::M] = f.coeffs
    # everything between the last coefficient and M*known_to is a known zero
    out = np.concatenate([out, f.ring.zeros(M - 1)]) if f.prec else out
    return FracQSeries(f.ring, f.offset24 * M, out)


def reduce_mod(f: FracQSeries, modulus: int) -> FracQSeries:
    """Map an integral or l-integral rational series into Z/modulus."""
    target = Zmod(modulus)
    if f.ring.is_residue:
        if f.ring.modulus % modulus:
            raise InvalidModulus(f"{modulus} does not divide {f.ring.modulus}")
        return FracQSeries(target, f.offset24, f.coeffs % modulus)
    if f.ring.kind == INTEGER:
        return FracQSeries(target, f.offset24,
                           np.array([int(c) % modulus for c in f.coeffs], dtype=np.int64))
    p = target.prime
    out = np.empty(f.prec, dtype=np.int64)
    for i, c in enumerate(f.coeffs):
        if c.denominator % p == 0:
            raise DenominatorNotCoprime(f"coefficient {c} is not {p}-integral")
        out[i] = c.numerator * pow(c.denominator, -1, modulus) % modulus
    return FracQSeries(target, f.offset24, out)


def to_integers(f: FracQSeries, symmetric: bool = False) -> FracQSeries:
    """Lift residues to integer representatives, or clear a trivial QQ denominator."""
    if f.ring.kind == INTEGER:
        return f
    if f.ring.kind == RATIONAL:
        if any(c.denominator != 1 for c in f.coeffs):
            raise ValueError("series has non-integral coefficients")
        return FracQSeries(ZZ, f.offset24, ZZ.array(c.numerator for c in f.coeffs))
    M = f.ring.modulus
    vals = f.coeffs.tolist()
    if symmetric:
        vals = [v - M if v > M // 2 else v for v in vals]
    return FracQSeries(ZZ, f.offset24, ZZ.array(vals))


def to_rationals(f: FracQSeries) -> FracQSeries:
    if f.ring.kind == RATIONAL:
        return f
    return FracQSeries(QQ, f.offset24, QQ.array(to_integers(f).coeffs))
