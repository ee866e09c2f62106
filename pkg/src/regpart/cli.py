"""Command line front end: ``regpart bval | rseq | match | discover | scan``.

Exit codes: 0 success, 2 usage error, 3 computation error (including an
insufficient window), 4 no matching form, 5 rank obstruction.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, engine, lab, report
from .cache import SeriesCache
from .character import make_context
from .errors import (
    Cancelled,
    InsufficientPrecision,
    NoMatch,
    NotPrime,
    PrimeTooSmall,
    RankObstruction,
    RegpartError,
)
from .forms import (
    DETERMINED_HEURISTIC,
    VERIFIED_TO_STURM,
    delta_eisenstein_coords,
    dim_level1,
    lowest_weight_form,
    match_level1_form,
    render_delta_e,
)
from .lab import ZERO_SCALAR
from .series import residue_ring

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_NOMATCH, EXIT_RANK = 0, 2, 3, 4, 5

log = logging.getLogger("regpart")


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--no-cache", action="store_true", help="skip the on-disk cache")
    common.add_argument("--cache-dir", help="cache directory (default $REGPART_CACHE_DIR)")
    common.add_argument("--config", help="file of key=value lines used as defaults")
    common.add_argument("--max-upstream", type=_positive, default=engine.DEFAULT_MAX_UPSTREAM,
                        help="largest b_l window a direct computation may use")
    common.add_argument("--progress", action="store_true", help="report stages on stderr")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="regpart", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"regpart {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bval", parents=[common], help="values of b_l(n)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--n", type=_nonneg, required=True, nargs="+")
    s.add_argument("--mod-power", type=_nonneg, default=0, help="reduce mod l^m (0: exact)")

    s = sub.add_parser("rseq", parents=[common], help="coefficients of R_l(b)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--b", type=_nonneg, required=True)
    s.add_argument("--mod-power", type=_nonneg, default=1, help="work mod l^m (0: exact)")
    s.add_argument("--prec", type=_positive, default=20)
    s.add_argument("--path", choices=engine.PATHS, default=engine.AUTO)

    s = sub.add_parser("match", parents=[common], help="identify R_l(b) mod l^m as a level-1 form")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--b", type=_positive, required=True)
    s.add_argument("--mod-power", type=_positive, default=1)
    s.add_argument("--prec", type=_positive, help="coefficients to use (default: Sturm window)")

    s = sub.add_parser("discover", parents=[common], help="find B with R_l(b1) = B R_l(b2) mod l^m")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--b1", type=_nonneg, required=True)
    s.add_argument("--b2", type=_nonneg, required=True)
    s.add_argument("--mod-power", type=_positive, default=1)
    s.add_argument("--prec", type=_positive, help="window q^1..q^prec (default: Sturm window)")
    s.add_argument("--check-n", type=int, default=10, help="cross-check b_l values for n <= N")

    s = sub.add_parser("scan", parents=[common], help="rank stabilization table")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--mod-power", type=_positive, default=1)
    s.add_argument("--max-b", type=_positive, required=True)
    s.add_argument("--parity", choices=("odd", "even"), default="odd")
    s.add_argument("--prec", type=_positive)
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    return p


def _read_config(path: str) -> list:
    args = []
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            args.append(flag)
        elif value.lower() in ("false", "no", "off", ""):
            continue
        else:
            args.extend([flag, *value.split()])
    return args


def _expand_config(argv: list) -> list:
    """Insert config entries right after the subcommand so explicit flags win."""
    for i, tok in enumerate(argv):
        path = None
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        if path is not None:
            extra = _read_config(path)
            pos = next((j for j, t in enumerate(argv) if not t.startswith("-")), len(argv))
            return argv[:pos + 1] + extra + argv[pos + 1:]
    return argv


def _check_prime(ell: int):
    try:
        return make_context(ell)
    except (NotPrime, PrimeTooSmall) as e:
        raise UsageError(str(e)) from None


def _hook(args):
    if not args.progress:
        return None

    def hook(stage, done, total):
        print(f"[{done}/{total}] {stage}", file=sys.stderr)
    return hook


def cmd_bval(args, out):
    _check_prime(args.ell)
    nmax = max(args.n)
    if args.mod_power:
        ring = residue_ring(args.ell, args.mod_power)
        g = engine.b_ell_series(args.ell, nmax + 1, ring)
        vals = {n: int(g[n]) for n in args.n}
    else:
        vals = {n: engine.b_ell_exact(args.ell, n) for n in args.n}
    if args.json:
        out(report.dumps({"schema_version": report.SCHEMA_VERSION, "engine_version": __version__,
                          "ell": args.ell, "m": args.mod_power,
                          "values": {str(n): v for n, v in vals.items()}}))
    else:
        for n, v in vals.items():
            out(f"b_{args.ell}({n}) = {v}")
    return EXIT_OK


def cmd_rseq(args, out):
    _check_prime(args.ell)
    if args.mod_power == 0 and args.path == engine.LEVEL1:
        raise UsageError("the level1 path needs --mod-power >= 1")
    req = engine.RSeriesRequest(args.ell, args.b, args.mod_power, args.prec, args.path)
    f, info = engine.r_series_info(req, hook=_hook(args), max_upstream=args.max_upstream)
    log.info("R_%d(%d): path %s, upstream %d, %s", args.ell, args.b, info.path,
             info.upstream, info.status)
    if args.json:
        out(report.dumps(report.series_record(f, args.ell, args.b, args.mod_power)))
    else:
        mod = f" mod {args.ell}^{args.mod_power}" if args.mod_power else ""
        out(f"R_{args.ell}({args.b}){mod}, from q^{f.offset}, {f.prec} terms ({info.status}):")
        out(" ".join(str(int(c)) for c in f.to_list()))
    return EXIT_OK


def _match_series(args):
    ell, b, m = args.ell, args.b, args.mod_power
    k = engine.r_weight(ell, b, m)
    off = engine.r_offset(ell, b)
    if args.prec:
        precs = [args.prec]
    else:
        # Sturm window when reachable, else the dimension plus a margin
        precs = [max(1, engine.lift_window(ell, b, m) - off),
                 max(1, dim_level1(k, True) + 10 - off)]
    last = None
    for prec in precs:
        req = engine.RSeriesRequest(ell, b, m, prec)
        try:
            f, info = engine.r_series_info(req, hook=_hook(args), max_upstream=args.max_upstream)
            return k, f, info
        except InsufficientPrecision as e:
            log.info("window %d unreachable: %s", prec, e)
            last = e
    raise last


def cmd_match(args, out):
    _check_prime(args.ell)
    k, f, info = _match_series(args)
    res = match_level1_form(f, k, cuspidal=True)
    verification = res.status
    if info.status != VERIFIED_TO_STURM:
        verification = DETERMINED_HEURISTIC
    status = ZERO_SCALAR if res.is_zero else verification
    exps, coords = delta_eisenstein_coords(f, k, True)
    rendering = render_delta_e(exps, coords, k)
    if res.is_zero:
        low_k, low_exps, low_coords = k, exps, coords
    else:
        low_k, low_exps, low_coords = lowest_weight_form(f, k, True)
    low = render_delta_e(low_exps, low_coords, low_k)
    rec = {"schema_version": report.SCHEMA_VERSION, "engine_version": __version__,
           "ell": args.ell, "b": args.b, "m": args.mod_power, "weight": k,
           "miller_coords": [int(c) for c in res.coords],
           "delta_e": {"exponents": exps, "coords": [int(c) for c in coords]},
           "rendering": rendering,
           "lowest_weight": {"weight": low_k, "exponents": low_exps,
                             "coords": [int(c) for c in low_coords], "rendering": low},
           "zero": res.is_zero, "status": status, "verification": verification,
           "window": res.window, "sturm_target": res.sturm_target}
    if args.json:
        out(report.dumps(rec))
    else:
        out(f"R_{args.ell}({args.b}) mod {args.ell}^{args.mod_power} is in S_{k}")
        out(f"  Miller coordinates: {rec['miller_coords']}")
        if res.is_zero:
            out("  Delta/E form: 0  (zero combination)")
        else:
            out(f"  Delta/E form: {rendering}")
            if low_k != k:
                out(f"  lowest weight {low_k}: {low}")
        out(f"  status: {status} ({verification}, window q^0..q^{res.window - 1}, "
            f"Sturm target {res.sturm_target})")
    return EXIT_OK


def cmd_discover(args, out):
    _check_prime(args.ell)
    if (args.b1 - args.b2) % 2:
        raise UsageError("b1 and b2 must have the same parity")
    if not args.b2 > args.b1:
        raise UsageError("need b1 < b2")
    prec = args.prec or engine.lift_window(args.ell, args.b1, args.mod_power) - 1
    rep = lab.discover_scalar(args.ell, args.b1, args.b2, args.mod_power, prec=prec,
                              check_n=args.check_n, max_upstream=args.max_upstream,
                              hook=_hook(args))
    rec = report.report_record(rep)
    if args.json:
        out(report.dumps(rec))
    else:
        out(rec["summary"])
        out(f"  status: {rep.status} (window q^1..q^{rep.window}, Sturm target {rep.sturm_target})")
        for c in rep.checks:
            ok = "ok" if c["lhs"] == c["rhs"] else "FAIL"
            out(f"  n={c['n']}: b({c['index_lhs']}) = {c['lhs']}, "
                f"B*b({c['index_rhs']}) = {c['rhs']}  {ok}")
    if any(c["lhs"] != c["rhs"] for c in rep.checks):
        print("error: b_l value cross-check failed", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_scan(args, out):
    _check_prime(args.ell)
    if args.parity == "even" and args.max_b < 2:
        raise UsageError("an even scan needs --max-b >= 2")
    table = lab.stabilization_scan(args.ell, args.mod_power, args.parity, args.max_b,
                                   prec=args.prec, max_upstream=args.max_upstream,
                                   hook=_hook(args))
    fmt = "json" if args.json else args.format
    if fmt == "json":
        out(report.dumps(report.table_record(table)))
    elif fmt == "csv":
        out(report.table_csv(table).rstrip("\n"))
    else:
        out(f"l={table.ell} m={table.m} parity={table.parity} window={table.prec} "
            f"rank bound={table.rank_bound}")
        for row in report.table_rows(table):
            out(f"  b={row['b']:>3}  rank={row['rank']}  howell rows={row['howell_rows']}  "
                f"{row['status']}")
        onset = table.onset if table.conclusive else f"{table.onset} (inconclusive)"
        out(f"  onset: {onset}")
    return EXIT_OK


COMMANDS = {"bval": cmd_bval, "rseq": cmd_rseq, "match": cmd_match,
            "discover": cmd_discover, "scan": cmd_scan}


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or print
    parser = build_parser()
    try:
        argv = _expand_config(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"regpart: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    old_store = engine.set_store(None if args.no_cache else SeriesCache(args.cache_dir))
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"regpart: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientPrecision as e:
        need = f" (required window: {e.required})" if e.required is not None else ""
        print(f"error: {e}{need}", file=sys.stderr)
        return EXIT_COMPUTE
    except NoMatch as e:
        print(f"no match: {e}", file=sys.stderr)
        return EXIT_NOMATCH
    except RankObstruction as e:
        print(f"rank obstruction: {e}", file=sys.stderr)
        return EXIT_RANK
    except (Cancelled, RegpartError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as e:
        print(f"regpart: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        engine.set_store(old_store)


if __name__ == "__main__":
    sys.exit(main())
