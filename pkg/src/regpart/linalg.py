"""Row reduction over Z/p^m: Howell forms, minimal generator counts, membership.

Z/p^m is a local ring, so every entry is u * p^v with u a unit and the usual
pivoting "by smallest valuation" works.  The Howell form additionally feeds
p^(m-v) * (pivot row) back into the pool; that keeps the form canonical and
makes greedy membership reduction complete.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, EmptyInput, NonUnit, NotInSpan
from .series import prime_power


def _valuation(x: int, p: int, m: int) -> int:
    if x == 0:
        return m
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def invert_unit(x: int, modulus: int) -> int:
    x %= modulus
    try:
        return pow(x, -1, modulus)
    except ValueError:
        raise NonUnit(f"{x} is not a unit mod {modulus}") from None


def _split(modulus: int):
    pm = prime_power(modulus)
    if pm is None:
        raise ValueError(f"modulus {modulus} is not a prime power")
    return pm


@dataclass(frozen=True, eq=False)
class HowellMatrix:
    modulus: int
    ncols: int
    rows: tuple
    pivots: tuple          # (column, valuation) per row
    transform: tuple       # row i = sum transform[i][g] * generator g
    ngens: int

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return span_rank(self)

    def __eq__(self, other):
        if not isinstance(other, HowellMatrix):
            return NotImplemented
        return (self.modulus, self.ncols, self.rows) == (other.modulus, other.ncols, other.rows)

    def __hash__(self):
        return hash((self.modulus, self.ncols, self.rows))

    def __contains__(self, v) -> bool:
        try:
            solve_membership(v, self)
        except NotInSpan:
            return False
        return True


def howell_reduce(generators, modulus: int) -> HowellMatrix:
    gens = [[int(x) % modulus for x in g] for g in generators]
    if not gens:
        raise EmptyInput("no generators given")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise DimensionMismatch("generators have different lengths")
    p, m = _split(modulus)
    ng = len(gens)
    # each pool entry is (row, coefficients over the generators)
    pool = [(g, [int(i == j) for j in range(ng)]) for i, g in enumerate(gens)]
    done = []

    def comb(a, s, b, t):
        return [(s * x + t * y) % modulus for x, y in zip(a, b)]

    for col in range(n):
        if not any(r[col] for r, _ in pool):
            continue
        best = min(range(len(pool)),
                   key=lambda i: _valuation(pool[i][0][col], p, m) if pool[i][0][col] else m + 1)
        row, tr = pool.pop(best)
        v = _valuation(row[col], p, m)
        pv = p**v
        u = invert_unit(row[col] // pv, modulus)
        row, tr = comb(row, u, row, 0), comb(tr, u, tr, 0)
        rest = []
        for r, t in pool:
            if r[col]:
                f = r[col] // pv
                r, t = comb(r, 1, row, -f), comb(t, 1, tr, -f)
            rest.append((r, t))
        if v:
            ann = p ** (m - v)
            r, t = comb(row, ann, row, 0), comb(tr, ann, tr, 0)
            if any(r):
                rest.append((r, t))
        pool = [(r, t) for r, t in rest if any(r)]
        # reduce entries above the new pivot into [0, p^v)
        for i, (r, t, c, w) in enumerate(done):
            f = r[col] // pv
            if f:
                done[i] = (comb(r, 1, row, -f), comb(t, 1, tr, -f), c, w)
        done.append((row, tr, col, v))
    return HowellMatrix(
        modulus, n,
        tuple(tuple(r) for r, _, _, _ in done),
        tuple((c, w) for _, _, c, w in done),
        tuple(tuple(t) for _, t, _, _ in done),
        ng,
    )


def span_rank(h: HowellMatrix) -> int:
    """Minimal number of generators of the row span (= dim of M/pM over F_p).

    This can be smaller than the Howell row count: (p, 1) mod p^2 spans a
    cyclic module whose Howell form also lists (0, p).
    """
    if not h.rows:
        return 0
    p, m = _split(h.modulus)
    M = h.modulus
    A = [list(r) for r in h.rows]
    rank = 0
    while A:
        best = None
        for i, r in enumerate(A):
            for j, x in enumerate(r):
                if x:
                    v = _valuation(x, p, m)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        rank += 1
        piv = A.pop(i)
        pv = p**v
        u = invert_unit(piv[j] // pv, M)
        piv = [x * u % M for x in piv]
        # row ops clear column j; the column ops needed afterwards never
        # change valuations below the pivot, so dropping column j is enough
        newA = []
        for r in A:
            f = r[j] // pv
            r = [(x - f * y) % M for x, y in zip(r, piv)]
            del r[j]
            newA.append(r)
        A = [r for r in newA if any(r)]
    return rank


def solve_membership(target, h: HowellMatrix) -> list:
    """Coefficients c over the original generators with sum c_g * gen_g = target."""
    M = h.modulus
    t = [int(x) % M for x in target]
    if len(t) != h.ncols:
        raise DimensionMismatch(f"target has length {len(t)}, matrix has {h.ncols} columns")
    p, _ = _split(M)
    coeffs = [0] * h.ngens
    for row, (col, v), tr in zip(h.rows, h.pivots, h.transform):
        x = t[col]
        if not x:
            continue
        pv = p**v
        if x % pv:
            raise NotInSpan(f"entry {x} at column {col} not divisible by pivot {pv}")
        f = x // pv
        t = [(a - f * b) % M for a, b in zip(t, row)]
        coeffs = [(a + f * b) % M for a, b in zip(coeffs, tr)]
    if any(t):
        raise NotInSpan("target has a residual outside the span")
    return coeffs


def solve_row_coefficients(target, h: HowellMatrix) -> list:
    """Like solve_membership but in terms of the Howell rows themselves."""
    M = h.modulus
    t = [int(x) % M for x in target]
    if len(t) != h.ncols:
        raise DimensionMismatch("length mismatch")
    p, _ = _split(M)
    out = []
    for row, (col, v) in zip(h.rows, h.pivots):
        x = t[col]
        pv = p**v
        if x % pv:
            raise NotInSpan(f"entry {x} at column {col} not divisible by pivot {pv}")
        f = x // pv
        out.append(f)
        if f:
            t = [(a - f * b) % M for a, b in zip(t, row)]
    if any(t):
        raise NotInSpan("target has a residual outside the span")
    return out


def is_submodule(small: HowellMatrix, big: HowellMatrix) -> bool:
    return all(r in big for r in small.rows)
