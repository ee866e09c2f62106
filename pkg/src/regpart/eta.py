"""Eta quotients prod eta(delta z)^r_delta as symbolic objects with lazy expansion."""

from __future__ import annotations

from dataclasses import dataclass, field

from .series import ZZ, FracQSeries, dilate, euler_product, series_div, series_mul, series_pow


@dataclass(frozen=True)
class EtaQuotient:
    level: int
    exponents: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(d): int(r) for d, r in self.exponents.items() if r}
        for d in clean:
            if d < 1 or self.level % d:
                raise ValueError(f"{d} does not divide level {self.level}")
        object.__setattr__(self, "exponents", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.level, tuple(self.exponents.items())))

    @property
    def offset24(self) -> int:
        return sum(d * r for d, r in self.exponents.items())

    @property
    def weight2(self) -> int:
        """Twice the weight."""
        return sum(self.exponents.values())

    def __mul__(self, other: EtaQuotient) -> EtaQuotient:
        level = self.level * other.level // _gcd(self.level, other.level)
        exps = dict(self.exponents)
        for d, r in other.exponents.items():
            exps[d] = exps.get(d, 0) + r
        return EtaQuotient(level, exps)

    def __pow__(self, e: int) -> EtaQuotient:
        return EtaQuotient(self.level, {d: r * e for d, r in self.exponents.items()})

    def expand(self, prec: int, ring=ZZ) -> FracQSeries:
        """q-expansion with ``prec`` known coefficients starting at q^(offset24/24).

        Positive factors are multiplied first (sparse products), then the
        negative ones are divided out one Euler factor at a time.
        """
        acc = FracQSeries.one(prec, ring)
        for d, r in self.exponents.items():
            if r > 0:
                base = euler_product(-(-prec // d), ring)
                if r > 1:
                    base = series_pow(base, r)
                acc = series_mul(acc, dilate(base, d).truncate(prec))
        for d, r in self.exponents.items():
            for _ in range(-r):
                acc = series_div(acc, euler_product(prec, ring, d))
        return acc.mul_q_power(self.offset24)

    def meta(self):
        from .character import eta_quotient_meta
        return eta_quotient_meta(self)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def eta(delta: int = 1, power: int = 1) -> EtaQuotient:
    return EtaQuotient(delta, {delta: power})
