import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_span
from regpart.errors import DimensionMismatch, EmptyInput, NonUnit, NotInSpan
from regpart.linalg import (
    howell_reduce,
    invert_unit,
    is_submodule,
    solve_membership,
    solve_row_coefficients,
    span_rank,
)


def test_identity_rank():
    h = howell_reduce([(1, 0), (0, 1)], 25)
    assert h.nrows == 2 and span_rank(h) == 2
    assert span_rank(howell_reduce([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 7**3)) == 3


def test_redundant_multiple():
    h = howell_reduce([(5, 10), (10, 20)], 25)
    assert h.rows == ((5, 10),)
    assert span_rank(h) == 1


def test_zero_matrix():
    h = howell_reduce([(0, 0, 0)], 49)
    assert h.nrows == 0 and span_rank(h) == 0


def test_two_non_unit_rows():
    assert span_rank(howell_reduce([(7, 0), (0, 7)], 49)) == 2


def test_rank_counts_generators_not_howell_rows():
    h = howell_reduce([(5, 1)], 25)
    assert span_rank(h) == 1
    assert h.nrows == 2          # Howell form also carries (0, 5)


def test_errors():
    with pytest.raises(EmptyInput):
        howell_reduce([], 25)
    with pytest.raises(DimensionMismatch):
        howell_reduce([(1, 2), (1,)], 25)
    h = howell_reduce([(1, 2)], 25)
    with pytest.raises(DimensionMismatch):
        solve_membership((1, 2, 3), h)
    with pytest.raises(NotInSpan):
        solve_membership((0, 1), h)


def test_membership_simple():
    h = howell_reduce([(1, 3, 0), (0, 1, 2)], 17)
    assert solve_membership((1, 3, 0), h) == [1, 0]
    assert solve_membership((0, 0, 0), h) == [0, 0]
    g = (3, 5, 7)
    assert solve_membership(tuple(14 * x % 17 for x in g), howell_reduce([g], 17)) == [14]


def test_invert_unit():
    assert invert_unit(11, 17) == 14
    assert all(invert_unit(1, 7**m) == 1 for m in range(1, 4))
    with pytest.raises(NonUnit):
        invert_unit(5, 125)
    # brute-force scan
    for M in (25, 49, 289):
        for x in range(1, M):
            if x % prime_of(M):
                y = invert_unit(x, M)
                assert x * y % M == 1


def prime_of(M):
    return next(p for p in range(2, M + 1) if M % p == 0)


def test_random_system_membership_mod_343():
    rnd = random.Random(7)
    M = 343
    gens = [[rnd.randrange(M) for _ in range(6)] for _ in range(4)]
    h = howell_reduce(gens, M)
    for i, g in enumerate(gens):
        c = solve_membership(g, h)
        back = [sum(ci * gg[j] for ci, gg in zip(c, gens)) % M for j in range(6)]
        assert back == [x % M for x in g]
        assert tuple(x % M for x in g) in h


def test_small_span_brute_force():
    # the full span over Z/25 of two generators, enumerated
    M = 25
    gens = [(5, 1, 0), (0, 5, 10)]
    span = brute_span(gens, M, range(M))
    h = howell_reduce(gens, M)
    for v in [(0, 0, 0), (5, 1, 0), (10, 7, 10), (0, 0, 5), (1, 0, 0), (0, 1, 0)]:
        assert (v in h) == (v in span)
    # every vector of the span reduces, and Howell rows lie in the span
    for v in list(span)[::17]:
        assert v in h
    assert all(r in span for r in h.rows)


def test_row_coefficients_and_submodule():
    M = 49
    big = howell_reduce([(1, 0, 3), (0, 7, 0)], M)
    small = howell_reduce([(2, 14, 6)], M)
    assert is_submodule(small, big)
    assert not is_submodule(howell_reduce([(0, 1, 0)], M), big)
    f = solve_row_coefficients((2, 14, 6), big)
    recon = [sum(c * r[j] for c, r in zip(f, big.rows)) % M for j in range(3)]
    assert recon == [2, 14, 6]


vectors = st.lists(st.lists(st.integers(0, 10**6), min_size=4, max_size=4),
                   min_size=1, max_size=4)
moduli = st.sampled_from([5, 25, 125, 49, 343, 289])


@given(vectors, moduli, st.randoms(use_true_random=False))
def test_howell_canonical_under_row_operations(gens, M, rnd):
    h = howell_reduce(gens, M)
    # permute, rescale rows by units, add redundant combinations
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    p = prime_of(M)
    alt = []
    for g in shuffled:
        u = rnd.randrange(1, M)
        while u % p == 0:
            u = rnd.randrange(1, M)
        alt.append([u * x % M for x in g])
    cs = [rnd.randrange(M) for _ in gens]
    combo = [sum(c * g[j] for c, g in zip(cs, gens)) % M for j in range(4)]
    alt.append(combo)
    assert howell_reduce(alt, M) == h


@given(vectors, moduli)
def test_generators_are_members(gens, M):
    h = howell_reduce(gens, M)
    for g in gens:
        c = solve_membership(g, h)
        back = [sum(ci * gg[j] for ci, gg in zip(c, gens)) % M for j in range(4)]
        assert back == [x % M for x in g]


@given(vectors, moduli)
def test_span_rank_bounds(gens, M):
    h = howell_reduce(gens, M)
    r = span_rank(h)
    assert 0 <= r <= min(len(gens), 4)
    assert r <= h.nrows


def _brute_min_generators(gens, M):
    """dim over F_p of span / p*span, by enumeration over tiny moduli."""
    p = prime_of(M)
    span = brute_span(gens, M, range(M))
    pspan = {tuple(p * x % M for x in v) for v in span}
    # |span / p span| = p^rank
    q = len(span) // len(pspan)
    r = 0
    while p**r < q:
        r += 1
    return r


@given(st.lists(st.lists(st.integers(0, 24), min_size=3, max_size=3), min_size=1, max_size=3))
def test_span_rank_matches_enumeration_mod_25(gens):
    assert span_rank(howell_reduce(gens, 25)) == _brute_min_generators(gens, 25)
