"""Exact and sieve-based counts of squarefree quartic values over integer intervals."""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from multiprocessing import get_context

import numpy as np

from ._kernels import INT64_MOD_LIMIT, prime_blocks, v_powmod, v_sqrt_mod
from .congruence import (
    SCAN_LIMIT,
    as_poly,
    discriminant,
    is_separable,
    _roots_mod_p_cached,
    _roots_mod_pk_cached,
)
from .density import _CTX_POINT, _CTX_UP, euler_product
from .modarith import (
    ConsistencyError,
    ExplicitBoundRequired,
    RangeLimitError,
    crt_combine,
    factorize,
    hensel_lift,
    is_squarefree,
)

# Interval length caps for the two exact-count engines and the hard input bound.
SIEVE_LEN_LIMIT = 4_194_304
FACTORIZE_LEN_LIMIT = 200_000
HI_LIMIT = 2 * 10**9

CSV_HEADER = "x,count,main,error,predicted,deviation,normalized"

# Exceeding this d_bound without a vectorized root constructor would force a
# per-prime scan whose cost grows like d_bound^2; refuse instead of stalling.
GENERIC_SUPPORT_LIMIT = 10**5

# sum_{d squarefree} 4^omega(d) / d^(3/2) = prod_p (1 + 4 p^(-3/2)) < 30,
# so the truncation remainder of the main-term sum past D is below 30/sqrt(D)
# per unit of interval length (Rankin's trick with exponent 1/2).
TAIL_CONSTANT = 30


@dataclass(frozen=True)
class Interval:
    """Closed integer interval [lo, hi]; hi defaults to 2*lo; lo > hi means empty."""

    lo: int
    hi: int = None

    def __post_init__(self):
        lo = int(self.lo)
        hi = 2 * lo if self.hi is None else int(self.hi)
        if lo < 0:
            raise ValueError("interval start must be >= 0")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self):
        return self.hi - self.lo + 1 if self.hi >= self.lo else 0

    def as_dict(self):
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class CountReport:
    """Sieve/exact count of an interval with the main/error decomposition."""

    interval: Interval
    exact_count: object  # int, or None when only the sieve ran
    sieve_count: object  # int, or None when only the exact count ran
    main_term: Decimal
    error_term: Decimal
    predicted: Decimal
    d_bound: object  # int, or None for the exact-only report
    tail_bound: Decimal

    def as_dict(self):
        return {
            "interval": self.interval.as_dict(),
            "exact_count": self.exact_count,
            "sieve_count": self.sieve_count,
            "main_term": _dec_str(self.main_term),
            "error_term": _dec_str(self.error_term),
            "predicted": _dec_str(self.predicted),
            "d_bound": self.d_bound,
            "tail_bound": _dec_str(self.tail_bound),
        }


@dataclass(frozen=True)
class ScanRow:
    """One error-scan measurement at x over [x, 2x]."""

    x: int
    count: int
    main: Decimal
    error: Decimal
    predicted: Decimal
    deviation: Decimal
    normalized: Decimal
    epsilon: Decimal

    def as_dict(self):
        return {
            "x": self.x,
            "count": self.count,
            "main": _dec_str(self.main),
            "error": _dec_str(self.error),
            "predicted": _dec_str(self.predicted),
            "deviation": _dec_str(self.deviation),
            "normalized": _dec_str(self.normalized),
            "epsilon": _dec_str(self.epsilon),
        }


@dataclass(frozen=True)
class EmpiricalDensity:
    """Exact squarefree proportion over an interval with a heuristic 3-sigma band."""

    interval: Interval
    count: int
    value: Decimal
    half_width: Decimal
    band: str = "heuristic"

    def as_dict(self):
        return {
            "interval": self.interval.as_dict(),
            "count": self.count,
            "value": _dec_str(self.value),
            "half_width": _dec_str(self.half_width),
            "band": self.band,
        }


def _dec_str(d):
    return format(d, "f")


def _icbrt(n):
    """Floor cube root of a nonnegative integer."""
    if n < 0:
        raise ValueError("cube root of a negative number")
    if n == 0:
        return 0
    x = int(round(n ** (1.0 / 3.0))) + 1
    while x > 1 and x * x * x > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


# residue-class prefilters: classes outside these provably contribute no roots
_CLASS_FILTERS = {
    (1, 0, 0, 0, 1): lambda ps: ps % 8 == 1,
    (1, 0, 0, 0, 2): lambda ps: (ps % 8 == 1) | (ps % 8 == 3),
    (1, 0, -2, 0, 2): lambda ps: (ps % 8 == 1) | (ps % 8 == 5),
    (1, 0, -1, 0, 1): lambda ps: ps % 12 == 1,
}

_PHI5 = (1, 1, 1, 1, 1)


def _has_vector_roots(poly):
    return poly.coeffs == _PHI5 or poly.is_biquadratic


def _awkward_primes(poly):
    """Primes dividing 2 * lc * disc; root construction handles them scalar-side."""
    d = discriminant(poly)
    return tuple(p for p, _ in factorize(abs(2 * poly.leading_coefficient * d)))


def _verify_pairs(coeffs, ps, rs):
    acc = np.zeros(ps.shape, dtype=np.int64)
    for c in coeffs:
        acc = (acc * rs + c) % ps
    if np.any(acc):
        raise ConsistencyError("vectorized root construction produced a non-root")


def _v_biquadratic(c4, c2, c0, ps):
    """Flat (p, r) root pairs of c4 x^4 + c2 x^2 + c0 over primes with p coprime
    to 2 * c4 * disc (callers prefilter); all four/two/zero root cases handled."""
    p = ps
    a4 = np.remainder(np.int64(c4), p)
    a2 = np.remainder(np.int64(c2), p)
    a0 = np.remainder(np.int64(c0), p)
    t = (a2 * a2 - 4 * (a4 * a0 % p)) % p
    ls = v_powmod(t, (p - 1) >> 1, p)
    if np.any(ls == 0):
        raise ConsistencyError("degenerate quadratic lane escaped the ramified filter")
    live = np.flatnonzero(ls == 1)
    if live.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    p = p[live]
    sq = v_sqrt_mod(t[live], p)
    inv = v_powmod(2 * a4[live] % p, p - 2, p)
    out_p, out_r = [], []
    for y in (
        (p - a2[live] + sq) % p * inv % p,
        (2 * p - a2[live] - sq) % p * inv % p,
    ):
        s = v_sqrt_mod(y, p)
        ok = np.flatnonzero(s > 0)
        out_p.append(p[ok])
        out_r.append(s[ok])
        out_p.append(p[ok])
        out_r.append(p[ok] - s[ok])
    return np.concatenate(out_p), np.concatenate(out_r)


def _v_order5(ps):
    """Flat (p, r) pairs of the four order-5 residues for primes p = 1 mod 5."""
    p = ps
    e = (p - 1) // 5
    z = v_powmod(2, e, p)
    w = 3
    while True:
        bad = np.flatnonzero(z == 1)
        if bad.size == 0:
            break
        if w > 1000:
            raise ConsistencyError("order-5 element search did not terminate")
        z[bad] = v_powmod(w, e[bad], p[bad])
        w += 1
    z2 = z * z % p
    z3 = z2 * z % p
    z4 = z3 * z % p
    return (
        np.concatenate([p, p, p, p]),
        np.concatenate([z, z2, z3, z4]),
    )


def _root_pairs(poly, limit):
    """Yield flat (p_array, r_array) blocks of roots of poly mod p, p <= limit.

    Covers biquadratic and order-5 cyclotomic shapes; primes dividing
    2 * lc * disc are skipped (handled scalar-side by the caller).
    """
    coeffs = poly.coeffs
    awkward = np.array(_awkward_primes(poly), dtype=np.int64)
    filt = _CLASS_FILTERS.get(coeffs)
    for block in prime_blocks(limit):
        ps = block[block > 2]
        if awkward.size:
            ps = ps[~np.isin(ps, awkward)]
        if ps.size == 0:
            continue
        if coeffs == _PHI5:
            ps = ps[ps % 5 == 1]
            if ps.size == 0:
                continue
            p, r = _v_order5(ps)
        else:
            if filt is not None:
                ps = ps[filt(ps)]
                if ps.size == 0:
                    continue
            p, r = _v_biquadratic(coeffs[0], coeffs[2], coeffs[4], ps)
        if p.size:
            _verify_pairs(coeffs, p, r)
            yield p, r


class _ValueSieve:
    """Exact squarefree flags for f over [lo, hi] by complete trial division.

    Every prime up to the cube root of max |f(n)| is divided out along its
    root progressions; the surviving cofactor has at most two prime factors,
    so it is squarefree unless it is a perfect square.
    """

    def __init__(self, poly, lo, hi):
        if hi < lo:
            raise ValueError("value sieve needs a nonempty interval")
        if hi - lo + 1 > SIEVE_LEN_LIMIT:
            raise RangeLimitError(
                f"interval length {hi - lo + 1} exceeds the sieve cap {SIEVE_LEN_LIMIT}"
            )
        self.poly, self.lo, self.hi = poly, lo, hi
        vals = [abs(poly(n)) for n in range(lo, hi + 1)]
        length = len(vals)
        bad = bytearray(length)
        zeros = set()
        for i, v in enumerate(vals):
            if v == 0:
                bad[i] = 1
                vals[i] = 1
                zeros.add(i)
        fmax = max(vals)
        b1 = _icbrt(fmax) + 1
        if b1 >= INT64_MOD_LIMIT:
            raise RangeLimitError(
                f"trial-division bound {b1} exceeds the int64-safe modulus limit"
            )
        awkward = _awkward_primes(poly)
        if any(p >= SCAN_LIMIT for p in awkward):
            raise RangeLimitError("ramified prime too large for the value sieve")
        self.b1 = b1

        def strike_progression(p, start, step):
            for i in range(start, length, step):
                if i in zeros:
                    continue
                v, rem = divmod(vals[i], p)
                if rem:
                    raise ConsistencyError(f"claimed root progression misses at {p}")
                if v % p == 0:
                    bad[i] = 1
                    while v % p == 0:
                        v //= p
                vals[i] = v

        for p in awkward:
            if p > b1:
                continue
            for r in _roots_mod_p_cached(poly.coeffs, p):
                strike_progression(p, (r - lo) % p, p)

        for ps, rs in _root_pairs(poly, b1):
            offs = (rs - lo) % ps
            small = ps <= length
            for p, off in zip(ps[small].tolist(), offs[small].tolist()):
                strike_progression(p, off, p)
            hit = ~small & (offs < length)
            for p, i in zip(ps[hit].tolist(), offs[hit].tolist()):
                if i in zeros:
                    continue
                v, rem = divmod(vals[i], p)
                if rem:
                    raise ConsistencyError(f"claimed root progression misses at {p}")
                if v % p == 0:
                    bad[i] = 1
                    while v % p == 0:
                        v //= p
                vals[i] = v

        for i, v in enumerate(vals):
            if not bad[i] and v > 1:
                s = math.isqrt(v)
                if s * s == v:
                    bad[i] = 1
        self.flags = np.frombuffer(bytes(bad), dtype=np.uint8) == 0

    def count(self, lo=None, hi=None):
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        if lo < self.lo or hi > self.hi:
            raise ValueError("subrange escapes the sieved interval")
        if hi < lo:
            return 0
        return int(self.flags[lo - self.lo : hi - self.lo + 1].sum())


def _count_by_factorization(poly, lo, hi):
    total = 0
    for n in range(lo, hi + 1):
        v = abs(poly(n))
        if v != 0 and is_squarefree(v):
            total += 1
    return total


def _count_single(poly, lo, hi):
    if _has_vector_roots(poly) and hi - lo + 1 <= SIEVE_LEN_LIMIT:
        try:
            return _ValueSieve(poly, lo, hi).count()
        except RangeLimitError:
            pass
    if hi - lo + 1 > FACTORIZE_LEN_LIMIT:
        raise RangeLimitError(
            f"interval length {hi - lo + 1} exceeds the factorization cap "
            f"{FACTORIZE_LEN_LIMIT} and no sieve path applies"
        )
    return _count_by_factorization(poly, lo, hi)


def _count_worker(args):
    coeffs, lo, hi = args
    poly = as_poly(coeffs)
    return _count_single(poly, lo, hi)


def count_exact(f, iv, workers=1):
    """#{n in iv : f(n) squarefree}, exact; parallel over subranges when asked."""
    poly = as_poly(f)
    if not is_separable(poly):
        raise ValueError("polynomial must be separable")
    if iv.lo > iv.hi:
        return 0
    if iv.hi > HI_LIMIT:
        raise RangeLimitError(f"interval end {iv.hi} exceeds the supported bound {HI_LIMIT}")
    length = iv.hi - iv.lo + 1
    if workers > 1 and length >= 4 * workers:
        cuts = [iv.lo + (length * k) // workers for k in range(workers + 1)]
        jobs = [
            (poly.coeffs, cuts[k], cuts[k + 1] - 1)
            for k in range(workers)
            if cuts[k] <= cuts[k + 1] - 1
        ]
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=get_context("fork")
        ) as pool:
            return sum(pool.map(_count_worker, jobs))
    return _count_single(poly, iv.lo, iv.hi)


def _roots_mod_d2(poly, d):
    """Roots of f mod d^2 by CRT over the prime powers of d; None when empty."""
    if d < 1:
        raise ValueError("divisor must be >= 1")
    if d == 1:
        return (0,), 1
    parts = []
    for p, e in factorize(d):
        rts = _roots_mod_pk_cached(poly.coeffs, p, 2 * e)
        if not rts:
            return None, d * d
        parts.append((rts, p ** (2 * e)))
    combined = [(0, 1)]
    for rts, q in parts:
        combined = [
            (crt_combine(r, m, s, q), m * q) for r, m in combined for s in rts
        ]
    return tuple(r for r, _ in combined), d * d


def _floor_count(roots, d2, lo, hi):
    lo1 = lo - 1
    return sum((hi - r) // d2 - (lo1 - r) // d2 for r in roots)


def count_by_divisor(f, d, iv):
    """#{n in iv : d^2 | f(n)} by the floor identity over CRT-combined roots."""
    poly = as_poly(f)
    if iv.lo > iv.hi:
        return 0
    roots, d2 = _roots_mod_d2(poly, d)
    if roots is None:
        return 0
    return _floor_count(roots, d2, iv.lo, iv.hi)


def _solvable_prime_roots(poly, bound):
    """Sorted (p, roots mod p^2) for primes p <= bound with rho(p^2) > 0."""
    table = {}
    for p in _awkward_primes(poly):
        if p <= bound:
            rts = _roots_mod_pk_cached(poly.coeffs, p, 2)
            if rts:
                table[p] = tuple(rts)
    if _has_vector_roots(poly):
        for ps, rs in _root_pairs(poly, bound):
            for p, r in zip(ps.tolist(), rs.tolist()):
                table.setdefault(p, [])
                if isinstance(table[p], list):
                    table[p].append(r)
        for p, rts in table.items():
            if isinstance(rts, list):
                table[p] = tuple(
                    sorted(hensel_lift(poly.coeffs, r, p, 2) for r in rts)
                )
    else:
        if bound > GENERIC_SUPPORT_LIMIT:
            raise RangeLimitError(
                f"support enumeration above {GENERIC_SUPPORT_LIMIT} needs a "
                "vectorized root constructor; pass a smaller d_bound"
            )
        awkward = set(_awkward_primes(poly))
        for block in prime_blocks(bound):
            for p in block.tolist():
                if p in awkward:
                    continue
                rts = _roots_mod_p_cached(poly.coeffs, p)
                if rts:
                    table[p] = tuple(
                        sorted(hensel_lift(poly.coeffs, r, p, 2) for r in rts)
                    )
    return sorted(table.items())


@dataclass(frozen=True)
class _SieveAccum:
    count: int
    main: Decimal
    terms: int


def _predicted_point(poly):
    return euler_product(poly, 10**4).point


def count_sieve(f, iv, d_bound=None):
    """Inclusion-exclusion count over squarefree supported d, with main/error split."""
    poly = as_poly(f)
    if not is_separable(poly):
        raise ValueError("polynomial must be separable")
    lo, hi = iv.lo, iv.hi
    length = iv.length
    if length == 0:
        zero = Decimal(0)
        return CountReport(iv, None, 0, zero, zero, zero, d_bound or 0, zero)
    if d_bound is None:
        if hi > 3000:
            raise ExplicitBoundRequired(
                "full-range sieving needs hi <= 3000; pass d_bound for larger intervals"
            )
        fmax = max(abs(poly(n)) for n in range(lo, hi + 1))
        d_bound = math.isqrt(fmax)
    if d_bound < 1:
        raise ValueError("d_bound must be >= 1")
    prime_roots = _solvable_prime_roots(poly, d_bound)
    primes = [p for p, _ in prime_roots]
    p2_roots = [rts for _, rts in prime_roots]

    ctx = _CTX_POINT
    sieve_count = length
    main_sum = Decimal(1)

    def visit(start, d, roots, sign):
        nonlocal sieve_count, main_sum
        for j in range(start, len(primes)):
            p = primes[j]
            nd = d * p
            if nd > d_bound:
                break
            q = p * p
            m = d * d
            nroots = [
                crt_combine(r, m, s, q) for r in roots for s in p2_roots[j]
            ]
            nd2 = nd * nd
            child_sign = -sign
            sieve_count += child_sign * _floor_count(nroots, nd2, lo, hi)
            main_sum += ctx.divide(Decimal(child_sign * len(nroots)), Decimal(nd2))
            visit(j + 1, nd, nroots, child_sign)

    visit(0, 1, (0,), 1)
    x_scale = Decimal(hi - lo)
    main_term = ctx.multiply(x_scale, main_sum)
    error_term = ctx.subtract(Decimal(sieve_count), main_term)
    predicted = ctx.multiply(x_scale, _predicted_point(poly))
    tail = _CTX_UP.divide(
        Decimal(TAIL_CONSTANT * length),
        _CTX_UP.sqrt(Decimal(d_bound)),
    )
    return CountReport(
        iv, None, sieve_count, main_term, error_term, predicted, d_bound, tail
    )


def exact_report(f, iv, workers=1):
    """CountReport for an exact-only run: the error term is count minus c_f * x."""
    cnt = count_exact(f, iv, workers=workers)
    poly = as_poly(f)
    ctx = _CTX_POINT
    predicted = ctx.multiply(Decimal(max(iv.hi - iv.lo, 0)), _predicted_point(poly))
    error = ctx.subtract(Decimal(cnt), predicted)
    return CountReport(iv, cnt, None, predicted, error, predicted, None, Decimal(0))


def scan_error(f, xs, c, epsilon):
    """ScanRows over [x, 2x] for each x: exact count against the main term c.point * x."""
    poly = as_poly(f)
    eps = Decimal(epsilon)
    ctx = _CTX_POINT
    xs = [int(x) for x in xs]
    if not xs:
        return []
    sieve = None
    span_lo, span_hi = min(xs), 2 * max(xs)
    if _has_vector_roots(poly) and span_hi - span_lo + 1 <= SIEVE_LEN_LIMIT:
        try:
            sieve = _ValueSieve(poly, span_lo, span_hi)
        except RangeLimitError:
            sieve = None
    rows = []
    half = Decimal("0.5")
    for x in xs:
        if x < 1:
            raise ValueError("scan x values must be >= 1")
        if sieve is not None:
            cnt = sieve.count(x, 2 * x)
        else:
            cnt = count_exact(poly, Interval(x, 2 * x))
        main = ctx.multiply(c.point, Decimal(x))
        error = ctx.subtract(Decimal(cnt), main)
        deviation = ctx.abs(error)
        power = ctx.multiply(half + eps, ctx.ln(Decimal(x)))
        denom = ctx.exp(power)
        normalized = ctx.divide(deviation, denom)
        rows.append(ScanRow(x, cnt, main, error, main, deviation, normalized, eps))
    return rows


def empirical_density(f, iv, workers=1):
    """Exact squarefree proportion over iv with a heuristic 3-sigma half-width."""
    if iv.length == 0:
        raise ValueError("empirical density needs a nonempty interval")
    cnt = count_exact(f, iv, workers=workers)
    ctx = _CTX_POINT
    n = Decimal(iv.length)
    value = ctx.divide(Decimal(cnt), n)
    variance = ctx.divide(
        ctx.multiply(value, ctx.subtract(Decimal(1), value)), n
    )
    half_width = ctx.multiply(Decimal(3), ctx.sqrt(variance))
    return EmpiricalDensity(iv, cnt, value, half_width)


def _scan_csv_cell(value):
    if isinstance(value, Decimal):
        return _dec_str(value)
    return str(value)


def rows_to_csv(items):
    """CSV text for ScanRow or CountReport items under the fixed seven-column header."""
    lines = [CSV_HEADER]
    for item in items:
        if isinstance(item, ScanRow):
            cells = [
                item.x,
                item.count,
                item.main,
                item.error,
                item.predicted,
                item.deviation,
                item.normalized,
            ]
        else:
            count = item.exact_count if item.exact_count is not None else item.sieve_count
            deviation = _CTX_POINT.abs(_CTX_POINT.subtract(Decimal(count), item.predicted))
            cells = [
                item.interval.lo,
                count,
                item.main_term,
                item.error_term,
                item.predicted,
                deviation,
                "",
            ]
        lines.append(",".join(_scan_csv_cell(c) for c in cells))
    return "\n".join(lines) + "\n"
