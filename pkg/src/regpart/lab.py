"""Module ranks, stabilization scans and scalar relations between R_l(b) tails.

Spans are taken over Z/l^m of coefficient windows q^1 .. q^prec (every R_l(b)
is a cusp form mod l^m, so nothing is lost by starting at q^1).  A scalar
relation R_l(b1) = B * R_l(b2) transfers verbatim to the b_l values because
both sides share the same eta power; ``b_values_check`` recomputes it from
the generating function alone.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .character import make_context
from .errors import ComputationCapExceeded, NoMatch, NotInSpan, RankObstruction
from .engine import (
    DEFAULT_MAX_UPSTREAM,
    AUTO,
    RSeriesRequest,
    b_coefficient_index,
    b_ell_series,
    d_c_operator,
    even_weight,
    k_value,
    r_offset,
    r_series_info,
    r_weight,
    x_c_operator,
    y_c_operator,
)
from .forms import (
    DETERMINED_HEURISTIC,
    VERIFIED_TO_STURM,
    delta_series,
    dim_level1,
    eisenstein_level1,
    match_level1_form,
    miller_basis,
    sturm_target,
)
from .linalg import howell_reduce, invert_unit, solve_membership, span_rank
from .series import residue_ring

ZERO_SCALAR = "ZeroScalar"


def rank_bound(ell: int) -> int:
    return (ell - 1) // 12 - (ell - 1) // 24


def rank_bound_via_dims(ell: int) -> int:
    c = make_context(ell).c
    return dim_level1((c * ell + ell - 1) // 2, True) - (c * (ell * ell - 1)) // (24 * ell)


def default_window(ell: int, m: int, parity: str) -> int:
    k = k_value(ell, m) if parity == "odd" else even_weight(ell, m)
    return dim_level1(k, True) + 10


def _vector(ell, b, m, prec, max_upstream, hook=None):
    """Coefficients of q^1 .. q^prec of R_l(b) mod l^m, plus how it was computed."""
    off = r_offset(ell, b)
    n = prec + 1 - off
    if n < 1:
        return [0] * prec, None
    f, info = r_series_info(RSeriesRequest(ell, b, m, n, AUTO), hook=hook,
                            max_upstream=max_upstream)
    return f.window(1, prec), info


def module_rank(ell: int, b_start: int, m: int, depth: int, prec: int | None = None,
                max_upstream: int = DEFAULT_MAX_UPSTREAM) -> int:
    """Minimal generator count of Span{R_l(b_start + 2i) mod l^m : i < depth}."""
    if depth <= 0:
        return 0
    parity = "odd" if b_start % 2 else "even"
    prec = prec or default_window(ell, m, parity)
    vecs = [_vector(ell, b_start + 2 * i, m, prec, max_upstream)[0] for i in range(depth)]
    return span_rank(howell_reduce(vecs, ell**m))


@dataclass
class RankTable:
    ell: int
    m: int
    parity: str
    max_b: int
    prec: int
    entries: dict                 # b -> rank of Span{R(b), R(b+2), ..., R(max_b)}
    howell_rows: dict             # b -> number of Howell rows
    onset: int | None
    conclusive: bool
    rank_bound: int
    statuses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["entries"] = {str(k): v for k, v in self.entries.items()}
        d["howell_rows"] = {str(k): v for k, v in self.howell_rows.items()}
        d["statuses"] = {str(k): v for k, v in self.statuses.items()}
        return d


def stabilization_scan(ell: int, m: int, parity: str, max_b: int, prec: int | None = None,
                       max_upstream: int = DEFAULT_MAX_UPSTREAM, hook=None) -> RankTable:
    if parity not in ("odd", "even"):
        raise ValueError("parity must be 'odd' or 'even'")
    first = 1 if parity == "odd" else 2
    bs = list(range(first, max_b + 1, 2))
    if not bs:
        raise ValueError(f"no {parity} b in [1, {max_b}]")
    prec = prec or default_window(ell, m, parity)
    vecs, statuses = {}, {}
    for b in bs:
        vecs[b], info = _vector(ell, b, m, prec, max_upstream, hook)
        statuses[b] = info.status if info else VERIFIED_TO_STURM
    forms, ranks, rows = {}, {}, {}
    for b in bs:
        h = howell_reduce([vecs[j] for j in bs if j >= b], ell**m)
        forms[b], ranks[b], rows[b] = h, span_rank(h), h.nrows
    onset = None
    for b in bs:
        if all(forms[j] == forms[b] for j in bs if j >= b):
            onset = b
            break
    return RankTable(ell, m, parity, max_b, prec, ranks, rows, onset, onset != bs[-1],
                     rank_bound(ell), statuses)


@dataclass
class CongruenceReport:
    ell: int
    m: int
    b1: int
    b2: int
    scalar: int
    prec_used: int
    sturm_target: int
    status: str
    cross_check_n_max: int = -1
    checks: list = field(default_factory=list)
    scalar_coset_modulus: int = 0     # scalar is determined modulo this
    window: int = 0                   # coefficients verified: q^1 .. q^window
    weight: int = 0
    paths: dict = field(default_factory=dict)

    @property
    def modulus(self) -> int:
        return self.ell**self.m

    def to_dict(self) -> dict:
        return asdict(self)


def _first_unit(vec, ell):
    for i, x in enumerate(vec):
        if x % ell:
            return i
    return None


def discover_scalar(ell: int, b1: int, b2: int, m: int, prec: int = 200,
                    check_n: int = 10, max_upstream: int = DEFAULT_MAX_UPSTREAM,
                    hook=None) -> CongruenceReport:
    """Find B with R_l(b1) = B * R_l(b2) mod l^m on q^1 .. q^prec."""
    if (b1 - b2) % 2:
        raise ValueError("b1 and b2 must have the same parity")
    if not b2 > b1 >= 0:
        raise ValueError("need 0 <= b1 < b2")
    make_context(ell)
    M = ell**m
    v1, i1 = _vector(ell, b1, m, prec, max_upstream, hook)
    v2, i2 = _vector(ell, b2, m, prec, max_upstream, hook)
    k = r_weight(ell, b1, m)
    target = sturm_target(k, ell)
    verified = (prec + 1 >= target
                and all(i is None or i.status == VERIFIED_TO_STURM for i in (i1, i2)))
    status = VERIFIED_TO_STURM if verified else DETERMINED_HEURISTIC
    paths = {str(b1): i1.path if i1 else None, str(b2): i2.path if i2 else None}
    if not any(v1):
        report = CongruenceReport(ell, m, b1, b2, 0, prec, target, ZERO_SCALAR,
                                  scalar_coset_modulus=1, window=prec, weight=k, paths=paths)
        return _with_checks(report, check_n, max_upstream)
    j = _first_unit(v1, ell)
    scalar, coset = None, M
    if j is not None:
        lam = v2[j] * invert_unit(v1[j], M) % M
        if any((y - lam * x) % M for x, y in zip(v1, v2)):
            raise RankObstruction(
                f"R_{ell}({b2}) is not a multiple of R_{ell}({b1}) mod {ell}^{m} "
                f"on q^1..q^{prec}")
        if lam % ell:
            scalar = invert_unit(lam, M)
    if scalar is None:
        # non-unit ratio, or R(b1) has non-unit content: solve in the span of R(b2)
        try:
            scalar = solve_membership(v1, howell_reduce([v2], M))[0]
        except NotInSpan:
            raise RankObstruction(
                f"R_{ell}({b1}) is not in the span of R_{ell}({b2}) mod {ell}^{m}") from None
        v = min(_val(x, ell, m) for x in v2)
        coset = ell ** (m - v)
        scalar %= coset
    report = CongruenceReport(ell, m, b1, b2, scalar, prec, target, status,
                              scalar_coset_modulus=coset, window=prec, weight=k, paths=paths)
    return _with_checks(report, check_n, max_upstream)


def _val(x, ell, m):
    if x == 0:
        return m
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


def _with_checks(report, check_n, max_upstream):
    if check_n < 0:
        return report
    n_max = check_n
    while n_max >= 0 and b_coefficient_index(report.ell, report.b2, n_max) >= max_upstream:
        n_max -= 1
    if n_max < 0:
        return report
    detail = b_values_check(report, n_max)
    report.cross_check_n_max = n_max
    report.checks = detail.checks
    return report


@dataclass
class CheckResult:
    passed: bool
    failing: list
    checks: list


def b_values_check(report: CongruenceReport, n_max: int) -> CheckResult:
    """Verify b_l(idx_b1(n)) = B * b_l(idx_b2(n)) mod l^m for 0 <= n <= n_max.

    Uses only the b_l generating series in Z/l^m, nothing from the operators.
    """
    ell, M = report.ell, report.modulus
    ring = residue_ring(ell, report.m)
    pairs = [(b_coefficient_index(ell, report.b1, n), b_coefficient_index(ell, report.b2, n))
             for n in range(n_max + 1)]
    top = max(max(p) for p in pairs) + 1
    g = b_ell_series(ell, max(top, 1), ring)
    checks, failing = [], []
    for n, (i, j) in enumerate(pairs):
        lhs = g[i] if i >= 0 else 0
        rhs = report.scalar * (g[j] if j >= 0 else 0) % M
        checks.append({"n": n, "lhs": lhs, "rhs": rhs, "index_lhs": i, "index_rhs": j})
        if lhs != rhs:
            failing.append(n)
    return CheckResult(not failing, failing, checks)


# bounds for the stabilization index

def _in_cusp_space(f, k) -> bool:
    try:
        match_level1_form(f, k, cuspidal=True)
        return True
    except NoMatch:
        return False


def _check_window(ell: int, k: int) -> int:
    return max(sturm_target(k, ell), dim_level1(k, True) + 10)


def _long_basis(w: int, length: int, ring):
    """An integral basis of M_w, cheap to expand far when w = 12."""
    if w == 12:
        return [eisenstein_level1(12, length, ring), delta_series(length, ring)]
    return list(miller_basis(w, False, length, ring).forms)


def d_bounds(ell: int, t_max: int = 2, cap: int = 19,
             max_upstream: int = DEFAULT_MAX_UPSTREAM) -> tuple:
    """(d_l, d'_l) computed from their defining minima, mod l.

    d_l: least t with f | D_c | X_c^t in S_{k_l(1)} mod l for all f in M_w,
    w = (l-1+c)/2.  d'_l: least t with f | Y_c^t in S_w mod l for the f in M_w
    vanishing to order ceil(c(l^2-1)/(24 l^2)).  Each t costs an expansion of
    length about l^(2t+1) times the check window.
    """
    if ell > cap:
        raise ComputationCapExceeded(f"d_bounds is capped at l <= {cap}")
    ctx = make_context(ell)
    ring = residue_ring(ell, 1)
    w = (ell - 1 + ctx.c) // 2
    k_odd = k_value(ell, 1)
    win_odd, win_even = _check_window(ell, k_odd), _check_window(ell, w)

    def first_t(images_at, k, win, scale):
        for t in range(t_max + 1):
            length = ell ** (2 * t + scale) * (win + 1) + 1
            if length > max_upstream:
                raise ComputationCapExceeded(
                    f"t = {t} needs expansions of length {length} (cap {max_upstream})")
            if all(_in_cusp_space(g.truncate(win + 1 - g.offset), k)
                   for g in images_at(t, length)):
                return t
        raise ComputationCapExceeded(f"no t <= {t_max} found")

    def odd_images(t, length):
        out = []
        for f in _long_basis(w, length, ring):
            g = d_c_operator(f, ctx)
            for _ in range(t):
                g = x_c_operator(g, ctx)
            out.append(g)
        return out

    order = math.ceil(ctx.c * (ell * ell - 1) / (24 * ell * ell))

    def even_images(t, length):
        out = []
        for f in _vanishing_basis(w, order, length, ring):
            for _ in range(t):
                f = y_c_operator(f, ctx)
            out.append(f)
        return out

    d = first_t(odd_images, k_odd, win_odd, 1)
    d_prime = first_t(even_images, w, win_even, 0)
    return d, d_prime


def _vanishing_basis(w: int, order: int, length: int, ring):
    """Basis of the forms in M_w with q-order >= order."""
    if w == 12 and order <= 1:
        delta = delta_series(length, ring)
        return [delta] if order == 1 else [eisenstein_level1(12, length, ring), delta]
    forms = miller_basis(w, False, length, ring).forms
    return [f for i, f in enumerate(forms) if i >= order]


def frak_b_bound(ell: int, m: int, cap: int = 19) -> int:
    """Upper bound for the stabilization index from d_l and d'_l."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d, dp = d_bounds(ell, cap=cap)
    if m == 1:
        return 2 * d + 1
    return 2 * (d + 1) + 2 * (dp + 1) * (m - 1)
