"""Command-line surface: rho, density, count, scan, classify, reciprocity."""
import argparse
import json
import os
import sys
from decimal import Decimal

from ._kernels import sieve_primes
from .congruence import (
    NAMED,
    as_poly,
    classify_prime,
    classify_quadratic,
    cyclotomic_splitting,
    quartic_residue_3,
    rho,
    _roots_mod_pk_cached,
)
from .counting import (
    CountReport,
    Interval,
    count_sieve,
    exact_report,
    rows_to_csv,
    scan_error,
)
from .density import density_variants, euler_product, euler_product_restricted
from .modarith import (
    ConsistencyError,
    RangeLimitError,
    cornacchia,
    crt_combine,
    factorize,
    quartic_residue,
)

SCHEMA = 1


def _emit_json(payload):
    print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=2))


def _dec(d):
    return format(d, "f")


def _parse_bound(text):
    try:
        return int(text)
    except ValueError:
        pass
    value = float(text)
    if value != int(value) or value < 0:
        raise ValueError(f"bound {text!r} is not a nonnegative integer")
    return int(value)


def _resolve_poly(args):
    if args.coeffs is not None:
        return as_poly(tuple(int(c) for c in args.coeffs.split(",")))
    return as_poly(args.poly)


def _roots_mod_m(poly, m):
    """Sorted roots of poly mod m by CRT over the prime powers of m."""
    if m == 1:
        return [0]
    combined = [(0, 1)]
    for p, k in factorize(m):
        rts = _roots_mod_pk_cached(poly.coeffs, p, k)
        if not rts:
            return []
        q = p**k
        combined = [(crt_combine(r, mm, s, q), mm * q) for r, mm in combined for s in rts]
    return sorted(r for r, _ in combined)


def cmd_rho(args):
    poly = _resolve_poly(args)
    m = args.m
    if m < 1:
        raise ValueError("modulus must be >= 1")
    count = rho(poly, m)
    roots = _roots_mod_m(poly, m)
    if args.format == "json":
        _emit_json({"m": m, "rho": count, "roots": roots})
    else:
        roots_text = ",".join(str(r) for r in roots) if roots else "-"
        print(f"m={m} rho={count} roots={roots_text}")
    return 0


def cmd_density(args):
    poly = _resolve_poly(args)
    bound = _parse_bound(args.bound)
    if args.variants:
        table = density_variants(poly, bound)
        if args.format == "json":
            _emit_json({k: v.as_dict() for k, v in table.items()})
        else:
            for key in ("full", "excl5", "half_full", "half_excl5"):
                est = table[key]
                print(
                    f"{key}: point={_dec(est.point)} "
                    f"lower={_dec(est.lower)} upper={_dec(est.upper)}"
                )
        return 0
    classes = None
    exclusions = frozenset()
    if args.classes:
        classes = frozenset(int(c) for c in args.classes.split(","))
    if args.exclude:
        exclusions = frozenset(int(p) for p in args.exclude.split(","))
    if classes is not None or exclusions:
        est = euler_product_restricted(poly, bound, classes, exclusions)
    else:
        est = euler_product(poly, bound)
    if args.format == "json":
        _emit_json(est.as_dict())
    else:
        print(f"point={_dec(est.point)}")
        print(f"lower={_dec(est.lower)}")
        print(f"upper={_dec(est.upper)}")
        print(f"truncation_bound={est.truncation_bound}")
        print(f"factors_used={est.factors_used}")
    return 0


def _merged_report(poly, iv, workers, d_bound):
    exact = exact_report(poly, iv, workers=workers)
    sieve = count_sieve(poly, iv, d_bound=d_bound)
    return CountReport(
        iv,
        exact.exact_count,
        sieve.sieve_count,
        sieve.main_term,
        sieve.error_term,
        sieve.predicted,
        sieve.d_bound,
        sieve.tail_bound,
    )


def cmd_count(args):
    poly = _resolve_poly(args)
    if args.x < 1:
        raise ValueError("x must be >= 1")
    iv = Interval(args.x)
    if args.method == "exact":
        report = exact_report(poly, iv, workers=args.workers)
    elif args.method == "sieve":
        report = count_sieve(poly, iv, d_bound=args.d_bound)
    else:
        report = _merged_report(poly, iv, args.workers, args.d_bound)
    if args.format == "json":
        _emit_json(report.as_dict())
    elif args.format == "csv":
        sys.stdout.write(rows_to_csv([report]))
    else:
        d = report.as_dict()
        print(f"interval=[{report.interval.lo},{report.interval.hi}]")
        for key in (
            "exact_count",
            "sieve_count",
            "main_term",
            "error_term",
            "predicted",
            "d_bound",
            "tail_bound",
        ):
            print(f"{key}={d[key]}")
    return 0


def cmd_scan(args):
    poly = _resolve_poly(args)
    xs = [int(x) for x in args.xs.split(",")]
    c = euler_product(poly, _parse_bound(args.bound))
    rows = scan_error(poly, xs, c, Decimal(args.epsilon))
    if args.format == "json":
        _emit_json({"rows": [r.as_dict() for r in rows]})
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _format_qf(qf):
    if qf is None:
        return ""
    return f"{qf.a}^2+{qf.D}*{qf.b}^2"


def cmd_classify(args):
    poly = _resolve_poly(args)
    bound = _parse_bound(args.bound)
    rows = [classify_prime(poly, p) for p in sieve_primes(bound).tolist()]
    if args.format == "json":
        _emit_json(
            {
                "rows": [
                    {
                        "p": r.p,
                        "mod8": r.residue_class_mod8,
                        "rho_p": r.rho_p,
                        "rho_p2": r.rho_p2,
                        "splitting": r.splitting,
                        "qf": _format_qf(r.qf),
                    }
                    for r in rows
                ]
            }
        )
    else:
        print("p,mod8,rho_p,rho_p2,splitting,qf")
        for r in rows:
            print(
                f"{r.p},{r.residue_class_mod8},{r.rho_p},{r.rho_p2},"
                f"{r.splitting},{_format_qf(r.qf)}"
            )
    return 0


def _reciprocity_quadratic(args):
    if args.disc is None or args.p is None:
        raise ValueError("quadratic needs --disc and --p")
    d = args.disc
    if d % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")
    if d % 4 == 0:
        g = (1, 0, -(d // 4))
    else:
        g = (1, -1, (1 - d) // 4)
    kind = classify_quadratic(g, args.p)
    return {"kind": kind, "disc": d, "p": args.p}, f"disc={d} p={args.p}: {kind}"


def _reciprocity_quartic2(args):
    if args.p is None:
        raise ValueError("quartic2 needs --p")
    p = args.p
    is_q = quartic_residue(2, p)
    payload = {"p": p, "a": None, "b": None, "quartic_residue": is_q}
    text = f"p={p}: 2 is {'a' if is_q else 'not a'} fourth power"
    if p % 8 == 1:
        rep = cornacchia(p, 1)
        if rep is None:
            raise ConsistencyError(f"{p} = a^2 + b^2 has no representation")
        by_form = rep.b % 8 == 0
        if by_form != is_q:
            raise ConsistencyError(
                f"Euler criterion and two-square form disagree at p={p}"
            )
        payload.update(a=rep.a, b=rep.b)
        text += f"; {p} = {rep.a}^2 + {rep.b}^2, b mod 8 = {rep.b % 8}"
    return payload, text


def _reciprocity_quartic3(args):
    if args.p is None:
        raise ValueError("quartic3 needs --p")
    p = args.p
    is_q = quartic_residue_3(p)
    payload = {"p": p, "quartic_residue": is_q}
    text = f"p={p}: 3 is {'a' if is_q else 'not a'} fourth power"
    return payload, text


def _reciprocity_cyclotomic(args):
    if args.n is None or args.p is None:
        raise ValueError("cyclotomic needs --n and --p")
    split = cyclotomic_splitting(args.n, args.p)
    payload = {
        "n": args.n,
        "p": args.p,
        "kind": split.kind,
        "count": split.count,
        "degree": split.degree,
        "multiplicity": split.multiplicity,
    }
    if split.kind == "factors":
        text = (
            f"n={args.n} p={args.p}: {split.count} factors of degree "
            f"{split.degree}"
        )
    else:
        text = f"n={args.n} p={args.p}: {split.kind}"
    return payload, text


def cmd_reciprocity(args):
    handler = {
        "quadratic": _reciprocity_quadratic,
        "quartic2": _reciprocity_quartic2,
        "quartic3": _reciprocity_quartic3,
        "cyclotomic": _reciprocity_cyclotomic,
    }[args.kind]
    payload, text = handler(args)
    if args.format == "json":
        _emit_json(payload)
    else:
        print(text)
    return 0


def _add_poly_flags(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--poly", choices=sorted(NAMED))
    group.add_argument("--coeffs", help="descending coefficients, e.g. 1,0,0,0,1")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quartfree",
        description="Squarefree values of integer quartics: local data, densities, counts.",
    )
    parser.add_argument(
        "--format", choices=("text", "json", "csv"), default="text"
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=int(os.environ.get("QUARTFREE_WORKERS", "1")),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rho", help="root count and roots of f mod m")
    _add_poly_flags(s)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("density", help="truncated density product with enclosure")
    _add_poly_flags(s)
    s.add_argument("--bound", required=True, help="truncation prime bound, e.g. 1e6")
    s.add_argument("--variants", action="store_true")
    s.add_argument("--classes", help="keep only primes in these classes mod 8")
    s.add_argument("--exclude", help="drop these primes from the product")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("count", help="count squarefree values over [x, 2x]")
    _add_poly_flags(s)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--method", choices=("exact", "sieve", "both"), default="exact")
    s.add_argument("--d-bound", dest="d_bound", type=int, default=None)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("scan", help="error-term growth scan over doubling intervals")
    _add_poly_flags(s)
    s.add_argument("--xs", required=True, help="comma-separated x values")
    s.add_argument("--epsilon", default="0.1")
    s.add_argument("--bound", default="10000", help="density truncation for the main term")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("classify", help="per-prime classification table")
    _add_poly_flags(s)
    s.add_argument("--bound", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("reciprocity", help="reciprocity-law spot checks")
    s.add_argument("kind", choices=("quadratic", "quartic2", "quartic3", "cyclotomic"))
    s.add_argument("--disc", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_reciprocity)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 4
    except RangeLimitError as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
