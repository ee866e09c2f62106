"""l-regular partition series and the operator chain R_l(b).

R_l(0) = eta(l z) eta(z)^(c-1), and R_l(b) is obtained from R_l(b-1) by
multiplying with Phi_l^c = (eta(l^2 z)/eta(z))^c and applying U(l) when b is
odd, or by U(l) alone when b is even.  Three evaluation paths are provided:

* ``operator``  -- the recursion applied literally,
* ``extract``   -- b_l(n) read off the generating function on the right
                   arithmetic progression, times eta(l z)^c or eta(z)^c,
* ``level1``    -- mod l^m only: match R_l(b-1) with its level-1 form and
                   push that (cheap, arbitrarily long) form through one step.

Every path returns R_l(b) on the canonical offset (see ``r_offset``) with
exactly ``prec`` known coefficients.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache

from .character import CharacterContext, make_context
from .errors import Cancelled, InsufficientPrecision, NonIntegralExponents
from .eta import EtaQuotient
from .forms import (
    DETERMINED_HEURISTIC,
    VERIFIED_TO_STURM,
    dim_level1,
    match_level1_form,
    miller_basis,
    sturm_target,
)
from .series import (
    ZZ,
    FracQSeries,
    dilate,
    euler_product,
    eta_expansion,
    extract_progression,
    pentagonal_terms,
    reduce_mod,
    residue_ring,
    series_add,
    series_div,
    series_mul,
)

log = logging.getLogger(__name__)

OPERATOR = "operator"
EXTRACT = "extract"
LEVEL1 = "level1"
AUTO = "auto"
PATHS = (OPERATOR, EXTRACT, LEVEL1, AUTO)

# longest upstream series the planner lets a direct path build
DEFAULT_MAX_UPSTREAM = 1_500_000


def _ctx(x) -> CharacterContext:
    return x if isinstance(x, CharacterContext) else make_context(int(x))


# b_l(n)

_exact_cache: dict = {}
_exact_lock = threading.Lock()


def b_ell_exact(ell: int, n: int) -> int:
    """Number of partitions of n with no part divisible by ell (exact)."""
    if n < 0:
        return 0
    with _exact_lock:
        vals = _exact_cache.setdefault(ell, [])
        if n >= len(vals):
            _extend_exact(ell, vals, n + 1)
        return vals[n]


def _extend_exact(ell: int, vals: list, upto: int):
    # b * prod(1-q^k) = prod(1-q^(ell k)), solved one coefficient at a time
    exps, signs = pentagonal_terms(upto)
    terms = list(zip(exps[1:], signs[1:]))
    rhs = {e * ell: s for e, s in zip(*pentagonal_terms(upto // ell + 1))}
    for i in range(len(vals), upto):
        acc = rhs.get(i, 0)
        for e, s in terms:
            if e > i:
                break
            acc -= s * vals[i - e]
        vals.append(acc)


_series_cache: dict = {}
_series_lock = threading.Lock()


def b_ell_series(ell: int, prec: int, ring=ZZ) -> FracQSeries:
    """prod (1 - q^(ell n)) / (1 - q^n) to ``prec`` coefficients.

    Residue rings use one modular pentagonal division; the longest series per
    (ell, ring) is kept so shorter requests are free.
    """
    if not ring.is_residue:
        b_ell_exact(ell, prec - 1)
        vals = _exact_cache[ell][:prec]
        return FracQSeries.from_coeffs(vals, ring, prec=prec)
    key = (ell, ring)
    with _series_lock:
        have = _series_cache.get(key)
    if have is not None and have.prec >= prec:
        return have.truncate(prec)
    g = series_div(euler_product(prec, ring, ell), euler_product(prec, ring))
    with _series_lock:
        old = _series_cache.get(key)
        if old is None or old.prec < g.prec:
            _series_cache[key] = g
    return g


# eta quotients used by the engine

def phi_quotient(ell: int) -> EtaQuotient:
    return EtaQuotient(ell * ell, {ell * ell: 1, 1: -1})


def r0_quotient(ctx) -> EtaQuotient:
    ctx = _ctx(ctx)
    return EtaQuotient(ctx.ell, {ctx.ell: 1, 1: ctx.c - 1})


def phi_ell(ell: int, prec: int, ring=ZZ) -> FracQSeries:
    return phi_quotient(ell).expand(prec, ring)


def a_ell(ell: int, prec: int, ring=ZZ) -> FracQSeries:
    return EtaQuotient(ell, {1: ell, ell: -1}).expand(prec, ring)


# operators

def _integral(f: FracQSeries):
    if not f.is_integral_exponent:
        raise NonIntegralExponents("operator needs an integral-exponent series")


def u_operator(f: FracQSeries, ell: int) -> FracQSeries:
    _integral(f)
    return extract_progression(f, 0, ell)


def v_operator(f: FracQSeries, ell: int) -> FracQSeries:
    _integral(f)
    return dilate(f, ell)


def phi_power(ctx, prec: int, ring) -> FracQSeries:
    ctx = _ctx(ctx)
    return (phi_quotient(ctx.ell) ** ctx.c).expand(prec, ring)


def d_c_operator(f: FracQSeries, ctx, prec: int | None = None) -> FracQSeries:
    """(f * Phi^c) | U(l).  With ``prec``, insist on that many output coefficients."""
    _integral(f)
    ctx = _ctx(ctx)
    if prec is not None:
        off = phi_quotient(ctx.ell).offset24 * ctx.c // 24
        need = ctx.ell * (-(-(f.offset + off) // ctx.ell) + prec - 1) + 1 - off
        if f.known_to < need:
            raise InsufficientPrecision(
                f"D_c output of {prec} terms needs input known to q^{need - 1}", required=need)
    out = u_operator(series_mul(f, phi_power(ctx, f.prec, f.ring)), ctx.ell)
    return out if prec is None else out.truncate(prec)


def x_c_operator(f: FracQSeries, ctx) -> FracQSeries:
    ctx = _ctx(ctx)
    return d_c_operator(u_operator(f, ctx.ell), ctx)


def y_c_operator(f: FracQSeries, ctx) -> FracQSeries:
    ctx = _ctx(ctx)
    return u_operator(d_c_operator(f, ctx), ctx.ell)


def hecke_t(f: FracQSeries, ell: int, k: int, ring=None) -> FracQSeries:
    """f | T(ell, k) = f | U(ell) + ell^(k-1) f | V(ell)."""
    if ring is not None and ring != f.ring:
        f = reduce_mod(f, ring.modulus)
    return series_add(u_operator(f, ell), v_operator(f, ell) * f.ring(ell ** (k - 1)))


# weights

@dataclass(frozen=True)
class KLadder:
    ell: int
    values: tuple

    def __getitem__(self, j: int) -> int:
        return self.values[j - 1]


EXCEPTIONAL = frozenset({(5, 3), (7, 2), (11, 2), (13, 2)})


def k_value(ell: int, j: int) -> int:
    c = _ctx(ell).c
    if j == 1:
        return (c * ell + ell - 1) // 2
    if (ell, j) == (5, 2):
        return 260
    if (ell, j) in EXCEPTIONAL:
        return (ell**j * (ell - 1) + c) // 2
    return (ell ** (j - 1) * (ell - 1) + c) // 2


def k_ladder(ell: int, m: int) -> KLadder:
    return KLadder(ell, tuple(k_value(ell, j) for j in range(1, m + 1)))


def even_weight(ell: int, m: int) -> int:
    """Level-1 weight that R_l(b), b even, is congruent to mod l^m."""
    return (ell ** (m - 1) * (ell - 1) + _ctx(ell).c) // 2


def r_weight(ell: int, b: int, m: int) -> int:
    return k_value(ell, m) if b % 2 else even_weight(ell, m)


# planning

def r_offset(ell: int, b: int) -> int:
    """Canonical lowest exponent used for R_l(b)."""
    c = _ctx(ell).c
    if b == 0:
        return (ell + c - 1) // 24
    if b % 2:
        return c * (ell + 1) // 24
    return 1


def _phi_c_offset(ctx) -> int:
    return ctx.c * (ctx.ell**2 - 1) // 24


def _step_need(ctx, b: int, top: int) -> int:
    """Known-to exponent of R(b-1) needed for R(b) known to ``top``."""
    need = ctx.ell * (top - 1) + 1
    return need - _phi_c_offset(ctx) if b % 2 else need


def _b_progression(ctx, b: int):
    """(a, M, offset24) with B_l(b) = sum_n b_l(M n + a) q^(n + offset24/24)."""
    M = ctx.ell**b
    o = ctx.c if b % 2 else 24 - ctx.c
    a = (M * o - ctx.ell + 1) // 24
    return a, M, o


@dataclass(frozen=True)
class PrecisionPlan:
    ell: int
    b: int
    prec: int
    path: str
    windows: tuple          # known-to exponent of R(0..b) (operator path)
    upstream: int           # longest series the path builds

    @property
    def r0_prec(self) -> int:
        return self.windows[0] - r_offset(self.ell, 0)


def plan_precision(ell: int, b: int, prec: int, path: str = OPERATOR) -> PrecisionPlan:
    ctx = _ctx(ell)
    if prec < 1:
        raise ValueError("prec must be >= 1")
    top = r_offset(ell, b) + prec
    if path == EXTRACT:
        a, M, o = _b_progression(ctx, b)
        count = top - (r_offset(ell, b) if b else 1)
        return PrecisionPlan(ell, b, prec, path, (top,), max(1, a + M * (count - 1) + 1))
    wins = [top]
    for j in range(b, 0, -1):
        wins.append(_step_need(ctx, j, wins[-1]))
    wins.reverse()
    return PrecisionPlan(ell, b, prec, path, tuple(wins), wins[0] - r_offset(ell, 0))


@dataclass(frozen=True)
class RSeriesRequest:
    ell: int
    b: int
    m: int = 1
    prec: int = 50
    path: str = AUTO

    def __post_init__(self):
        if self.b < 0 or self.m < 0 or self.prec < 1:
            raise ValueError("need b >= 0, m >= 0, prec >= 1")
        if self.path not in PATHS:
            raise ValueError(f"unknown path {self.path!r}")
        if self.m == 0 and self.path == LEVEL1:
            raise ValueError("the level-1 path works modulo l^m only")

    @property
    def ring(self):
        return ZZ if self.m == 0 else residue_ring(self.ell, self.m)

    @property
    def offset(self) -> int:
        return r_offset(self.ell, self.b)


@dataclass
class RInfo:
    """How an R_l(b) series was obtained."""
    path: str
    upstream: int = 0
    status: str = VERIFIED_TO_STURM
    lifts: list = field(default_factory=list)


def _check_hook(hook, stage, done, total):
    if hook is not None and hook(stage, done, total) is False:
        raise Cancelled(f"cancelled during {stage}")


def _canonical(f: FracQSeries, ell: int, b: int, prec: int) -> FracQSeries:
    return f.realign(24 * r_offset(ell, b)).truncate(prec)


def _r_operator(ctx, b, prec, ring, plan, hook):
    ell = ctx.ell
    wins = plan.windows
    if b == 0:
        return r0_quotient(ctx).expand(plan.r0_prec, ring)
    # R(0) * Phi^c is itself an eta quotient: one sparse division
    q = r0_quotient(ctx) * phi_quotient(ell) ** ctx.c
    first = q.expand(wins[0] + _phi_c_offset(ctx) - q.offset24 // 24, ring)
    _check_hook(hook, "R(0)*Phi^c", 1, b + 1)
    f = u_operator(first, ell)
    for j in range(2, b + 1):
        f = f.realign(24 * r_offset(ell, j - 1))
        _check_hook(hook, f"R({j})", j, b + 1)
        f = d_c_operator(f, ctx) if j % 2 else u_operator(f, ell)
    return f


def _r_extract(ctx, b, prec, ring, plan, hook):
    ell = ctx.ell
    a, M, o = _b_progression(ctx, b)
    g = b_ell_series(ell, plan.upstream, ring)
    _check_hook(hook, "b_l series", 1, 2)
    B = extract_progression(g, a, M).mul_q_power(o)
    B = B.realign(o)
    delta = ell if b % 2 else 1
    return series_mul(B, EtaQuotient(delta, {delta: ctx.c}).expand(B.prec, ring))


def _direct_path(req: RSeriesRequest, max_upstream: int) -> str | None:
    if req.path in (OPERATOR, EXTRACT):
        return req.path
    order = (OPERATOR,) if req.b <= 1 else (EXTRACT, OPERATOR)
    for p in order:
        if plan_precision(req.ell, req.b, req.prec, p).upstream <= max_upstream:
            return p
    return None


_r_cache: dict = {}
_r_lock = threading.Lock()
_store = None


def set_store(store):
    """Install a persistent store (``load(req)`` / ``save(req, f, info)``); returns the old one."""
    global _store
    old, _store = _store, store
    return old


def r_series(req: RSeriesRequest, hook=None, max_upstream: int = DEFAULT_MAX_UPSTREAM,
             info: RInfo | None = None) -> FracQSeries:
    """R_l(b) with ``req.prec`` known coefficients from q^r_offset(l, b)."""
    f, i = r_series_info(req, hook=hook, max_upstream=max_upstream)
    if info is not None:
        info.__dict__.update(i.__dict__)
    return f


def r_series_info(req: RSeriesRequest, hook=None, max_upstream: int = DEFAULT_MAX_UPSTREAM):
    key = (req, max_upstream)
    with _r_lock:
        hit = _r_cache.get(key)
    if hit is not None:
        return hit
    store = _store
    result = store.load(req) if store is not None else None
    if result is None:
        result = _compute(req, hook, max_upstream)
        if store is not None:
            store.save(req, *result)
    with _r_lock:
        _r_cache[key] = result
    return result


def clear_caches():
    with _r_lock:
        _r_cache.clear()
    with _series_lock:
        _series_cache.clear()


def _compute(req: RSeriesRequest, hook, max_upstream):
    ctx = _ctx(req.ell)
    ring = req.ring
    if req.path != LEVEL1:
        path = _direct_path(req, max_upstream)
        if path is not None:
            plan = plan_precision(req.ell, req.b, req.prec, path)
            if plan.upstream > max_upstream:
                raise InsufficientPrecision(
                    f"R_{req.ell}({req.b}) to {req.prec} terms by the {path} path needs "
                    f"{plan.upstream} upstream coefficients (cap {max_upstream})",
                    required=plan.upstream)
            log.debug("R_%d(%d) prec %d via %s, upstream %d",
                      req.ell, req.b, req.prec, path, plan.upstream)
            run = _r_operator if path == OPERATOR else _r_extract
            f = run(ctx, req.b, req.prec, ring, plan, hook)
            return _canonical(f, req.ell, req.b, req.prec), RInfo(path, plan.upstream)
        if req.m == 0:
            plan = plan_precision(req.ell, req.b, req.prec, EXTRACT)
            raise InsufficientPrecision(
                f"exact R_{req.ell}({req.b}) to {req.prec} terms needs {plan.upstream} "
                f"upstream coefficients (cap {max_upstream})", required=plan.upstream)
    return _r_level1(ctx, req, hook, max_upstream)


def lift_window(ell: int, b: int, m: int) -> int:
    """Window used to pin down R_l(b) mod l^m as a level-1 form."""
    k = r_weight(ell, b, m)
    return max(sturm_target(k, ell), dim_level1(k, True) + 10)


def _r_level1(ctx, req: RSeriesRequest, hook, max_upstream):
    ell, b, m = req.ell, req.b, req.m
    ring = req.ring
    if b == 0:
        raise InsufficientPrecision(
            f"R_{ell}(0) to {req.prec} terms exceeds the cap", required=req.prec)
    k_prev = r_weight(ell, b - 1, m)
    w = lift_window(ell, b - 1, m)
    prev, prev_info = r_series_info(RSeriesRequest(ell, b - 1, m, w, AUTO),
                                    hook=hook, max_upstream=max_upstream)
    match = match_level1_form(prev, k_prev, cuspidal=True)
    _check_hook(hook, f"lift R({b - 1})", b - 1, b)
    top = r_offset(ell, b) + req.prec
    need = _step_need(ctx, b, top)
    basis = miller_basis(k_prev, True, need, ring)
    g = basis.combination(match.coords)
    f = d_c_operator(g, ctx) if b % 2 else u_operator(g, ell)
    status = VERIFIED_TO_STURM
    if match.status != VERIFIED_TO_STURM or prev_info.status != VERIFIED_TO_STURM:
        status = DETERMINED_HEURISTIC
    info = RInfo(LEVEL1, prev_info.upstream, status,
                 prev_info.lifts + [(b - 1, k_prev, match.window, match.status)])
    return _canonical(f, ell, b, req.prec), info


def b_series_from_r(r: FracQSeries, b: int, ctx) -> FracQSeries:
    """Divide R_l(b) by eta(l z)^c (b odd) or eta(z)^c (b even) to recover B_l(b)."""
    ctx = _ctx(ctx)
    delta = ctx.ell if b % 2 else 1
    acc = r
    for _ in range(ctx.c):
        acc = series_div(acc, eta_expansion(delta, acc.prec, r.ring))
    o = ctx.c if b % 2 else 24 - ctx.c
    return acc.realign(o)


def b_coefficient_index(ctx, b: int, n: int) -> int:
    """Argument of b_l at the n-th coefficient (from the canonical offset) of B_l(b)."""
    a, M, _ = _b_progression(_ctx(ctx), b)
    return M * n + a


def b_values(ell: int, b: int, count: int, ring) -> list:
    """First ``count`` coefficients of B_l(b) straight from the b_l series."""
    ctx = _ctx(ell)
    idx = [b_coefficient_index(ctx, b, n) for n in range(count)]
    top = max(idx) + 1
    g = b_ell_series(ell, max(top, 1), ring)
    return [g[i] if i >= 0 else 0 for i in idx]


@lru_cache(maxsize=None)
def dims_summary(ell: int) -> tuple:
    ctx = _ctx(ell)
    k1 = k_value(ell, 1)
    return k1, dim_level1(k1, True), math.floor(ctx.c * (ell * ell - 1) / (24 * ell))
