"""Counting squarefree quartic values: sieve, factorization, divisor counts, scans."""
import re
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_squarefree
from quartfree.congruence import NAMED, QuarticPoly
from quartfree.counting import (
    CountReport,
    Interval,
    _count_by_factorization,
    _icbrt,
    _roots_mod_d2,
    _ValueSieve,
    count_by_divisor,
    count_exact,
    count_sieve,
    empirical_density,
    exact_report,
    rows_to_csv,
    scan_error,
)
from quartfree.density import DensityEstimate, euler_product
from quartfree.modarith import ExplicitBoundRequired, RangeLimitError

CYC8 = NAMED["cyc8"]
DIHED = NAMED["dihed"]
GENERIC_BIQUAD = QuarticPoly((1, 0, 3, 0, -5))
NO_FAST_PATH = QuarticPoly((1, 1, 0, 0, 1))


def brute_count(poly, lo, hi):
    return sum(1 for n in range(lo, hi + 1) if brute_squarefree(abs(poly(n))))


def test_interval_contract():
    iv = Interval(7)
    assert (iv.lo, iv.hi) == (7, 14)  # hi defaults to the doubled endpoint
    assert iv.length == 8
    assert Interval(0, 288).length == 289
    assert Interval(10, 5).length == 0  # empty, not an error
    assert Interval(3, 3).length == 1
    with pytest.raises(ValueError):
        Interval(-1, 5)
    iv = Interval(2, 9)
    assert iv.as_dict() == {"lo": 2, "hi": 9}


def test_icbrt():
    assert _icbrt(0) == 0
    assert _icbrt(7) == 1
    assert _icbrt(8) == 2
    assert _icbrt(10**24) == 10**8
    assert _icbrt(10**24 - 1) == 10**8 - 1


def test_count_exact_golden():
    assert count_exact(CYC8, Interval(134, 134)) == 0  # 134^4+1 = 17^2 * m
    assert count_exact(CYC8, Interval(1, 1)) == 1
    assert count_exact(CYC8, Interval(100, 200)) == 97
    assert count_exact(CYC8, Interval(10, 5)) == 0


def test_count_exact_matches_brute():
    for poly in (CYC8, DIHED, NAMED["phi5"], GENERIC_BIQUAD, NO_FAST_PATH):
        for lo, hi in ((0, 60), (1, 40), (30, 90)):
            assert count_exact(poly, Interval(lo, hi)) == brute_count(poly, lo, hi)


def test_zero_values_are_not_squarefree():
    # n^4 - 16 vanishes at n = 2; the zero value must count as bad, not crash
    poly = QuarticPoly((1, 0, 0, 0, -16))
    assert count_exact(poly, Interval(0, 10)) == brute_count(poly, 0, 10)
    assert count_exact(poly, Interval(2, 2)) == 0


def test_roots_mod_d2():
    roots, d2 = _roots_mod_d2(CYC8, 17)
    assert d2 == 289 and sorted(roots) == [110, 134, 155, 179]
    roots, d2 = _roots_mod_d2(CYC8, 3)
    assert d2 == 9 and roots is None  # no residue class gives 9 | n^4+1
    assert _roots_mod_d2(CYC8, 1) == ((0,), 1)


def test_count_by_divisor_golden():
    assert count_by_divisor(CYC8, 17, Interval(100, 200)) == 4
    assert count_by_divisor(CYC8, 3, Interval(1, 10**6)) == 0
    assert count_by_divisor(CYC8, 17, Interval(0, 288)) == 4
    assert count_by_divisor(CYC8, 1, Interval(5, 25)) == 21
    assert count_by_divisor(CYC8, 17, Interval(10, 5)) == 0


def test_count_by_divisor_periodicity():
    # a window of exact length d^2 contains every residue class once
    for d in (17, 41, 17 * 41):
        roots, d2 = _roots_mod_d2(CYC8, d)
        for start in (0, 7, 123456):
            iv = Interval(start, start + d2 - 1)
            assert count_by_divisor(CYC8, d, iv) == len(roots)


def test_count_by_divisor_matches_scan():
    for d in (2, 3, 5, 17, 34, 85):
        for lo, hi in ((0, 500), (100, 2000), (17, 17)):
            direct = sum(
                1 for n in range(lo, hi + 1) if CYC8(n) % (d * d) == 0
            )
            assert count_by_divisor(CYC8, d, Interval(lo, hi)) == direct, (d, lo, hi)


@given(st.integers(1, 60), st.integers(0, 3000), st.integers(0, 400))
@settings(max_examples=60, deadline=None)
def test_count_by_divisor_random(d, lo, width):
    hi = lo + width
    direct = sum(1 for n in range(lo, hi + 1) if DIHED(n) % (d * d) == 0)
    assert count_by_divisor(DIHED, d, Interval(lo, hi)) == direct


def test_count_sieve_golden():
    rep = count_sieve(CYC8, Interval(1, 10))
    assert rep.sieve_count == 10
    assert count_sieve(CYC8, Interval(10, 5)).sieve_count == 0
    rep = count_sieve(CYC8, Interval(100, 200))
    assert rep.sieve_count == 97
    assert rep.exact_count is None
    assert rep.main_term + rep.error_term == Decimal(97)  # the defining identity
    assert rep.d_bound is not None and rep.tail_bound > 0


def test_count_sieve_d_bound_stability():
    base = count_sieve(CYC8, Interval(100, 200)).sieve_count
    for d_bound in (40001, 90000):
        rep = count_sieve(CYC8, Interval(100, 200), d_bound=d_bound)
        assert rep.sieve_count == base
        assert rep.d_bound == d_bound


def test_count_sieve_requires_explicit_bound_on_long_ranges():
    with pytest.raises(ExplicitBoundRequired):
        count_sieve(CYC8, Interval(2000, 5000))
    # and the same range passes once a bound is given
    rep = count_sieve(CYC8, Interval(2000, 5000), d_bound=1000)
    assert rep.sieve_count == count_exact(CYC8, Interval(2000, 5000))


def test_count_sieve_matches_exact_all_named():
    for label in sorted(NAMED):
        poly = NAMED[label]
        for x in (50, 120, 333):
            iv = Interval(x)
            assert count_sieve(poly, iv).sieve_count == count_exact(poly, iv), (
                label,
                x,
            )


def test_count_sieve_tail_bound_covers_truncation():
    # with a small d_bound the trimmed divisor sum must stay within tail_bound
    # of the full one
    full = count_sieve(CYC8, Interval(100, 200), d_bound=40001)
    trimmed = count_sieve(CYC8, Interval(100, 200), d_bound=60)
    assert trimmed.sieve_count == full.sieve_count  # the count itself is exact
    assert abs(trimmed.main_term - full.main_term) <= trimmed.tail_bound
    assert trimmed.tail_bound > full.tail_bound


def test_value_sieve_matches_factorization():
    for poly in (CYC8, NAMED["ferm2"], DIHED, NAMED["phi5"], NAMED["phi12"]):
        for lo, hi in ((1, 400), (513, 650), (0, 120)):
            a = _ValueSieve(poly, lo, hi).count()
            b = _count_by_factorization(poly, lo, hi)
            assert a == b, (poly.label, lo, hi, a, b)


def test_value_sieve_generic_biquadratic():
    a = _ValueSieve(GENERIC_BIQUAD, 0, 800).count()
    b = _count_by_factorization(GENERIC_BIQUAD, 0, 800)
    assert a == b


@given(st.integers(0, 200000), st.integers(1, 250))
@settings(max_examples=25, deadline=None)
def test_value_sieve_random_windows(lo, width):
    hi = lo + width
    a = _ValueSieve(DIHED, lo, hi).count()
    b = _count_by_factorization(DIHED, lo, hi)
    assert a == b, (lo, hi, a, b)


def test_frozen_counts_tier1():
    assert count_exact(CYC8, Interval(10**4, 2 * 10**4)) == 9814
    assert count_exact(NAMED["ferm2"], Interval(10**4, 2 * 10**4)) == 7564
    assert count_exact(DIHED, Interval(10**4, 2 * 10**4)) == 9011


def test_parallel_determinism():
    base = count_exact(DIHED, Interval(1, 3000))
    for workers in (1, 2, 3, 5):
        assert count_exact(DIHED, Interval(1, 3000), workers=workers) == base


def test_range_limits():
    with pytest.raises(RangeLimitError):
        count_exact(CYC8, Interval(1, 3 * 10**9))
    with pytest.raises(RangeLimitError):
        count_exact(NO_FAST_PATH, Interval(1, 300000))  # no sieve path, too long
    with pytest.raises(ValueError):
        count_exact((1, -2, 1), Interval(1, 10))  # repeated root


def test_scan_error_golden():
    c = euler_product(CYC8, 10**4)
    rows = scan_error(CYC8, [1024, 2048, 1024], c, Decimal("0.1"))
    assert [r.x for r in rows] == [1024, 2048, 1024]
    assert rows[0] == rows[2]  # determinism, shared sieve or not
    r = rows[0]
    assert r.count == count_exact(CYC8, Interval(1024, 2048)) == 1007
    assert r.main == r.predicted
    assert abs(Fraction(r.main) - Fraction(c.point) * 1024) < Fraction(1, 10**40)
    assert Fraction(r.error) == Fraction(r.count) - Fraction(r.main)
    assert Fraction(r.deviation) == abs(Fraction(r.error))
    assert r.epsilon == Decimal("0.1")
    # normalized = deviation / x^0.6, sanity bracket
    assert Decimal("0.001") < r.normalized < Decimal("1")


def test_scan_error_zero_density():
    fake = DensityEstimate(
        point=Decimal(0),
        lower=Decimal(0),
        upper=Decimal(0),
        truncation_bound=100,
        factors_used=0,
    )
    rows = scan_error(CYC8, [100], fake, Decimal("0.25"))
    r = rows[0]
    assert r.main == 0 and r.predicted == 0
    assert r.deviation == Decimal(r.count)


def test_scan_error_rejects_tiny_x():
    c = euler_product(CYC8, 100)
    with pytest.raises(ValueError):
        scan_error(CYC8, [0], c, Decimal("0.1"))


def test_empirical_density_golden():
    e = empirical_density(CYC8, Interval(10**4, 2 * 10**4))
    assert e.count == 9814
    assert e.interval == Interval(10**4, 2 * 10**4)
    want = Fraction(9814, 10001)
    assert abs(Fraction(e.value) - want) < Fraction(1, 10**40)
    assert e.band == "heuristic"
    assert Decimal("0.0040") < e.half_width < Decimal("0.0041")  # 3*sqrt(v(1-v)/N)
    d = e.as_dict()
    assert d["count"] == 9814 and d["band"] == "heuristic"


def test_exact_report():
    rep = exact_report(CYC8, Interval(100, 200))
    assert isinstance(rep, CountReport)
    assert rep.exact_count == 97 and rep.sieve_count is None
    assert rep.d_bound is None and rep.tail_bound == 0
    assert rep.predicted == rep.main_term
    assert Fraction(rep.error_term) == 97 - Fraction(rep.main_term)
    d = rep.as_dict()
    assert d["interval"] == {"lo": 100, "hi": 200}
    assert d["exact_count"] == 97 and d["sieve_count"] is None


def test_rows_to_csv_scan_rows():
    c = euler_product(CYC8, 10**4)
    rows = scan_error(CYC8, [1024], c, Decimal("0.1"))
    csv = rows_to_csv(rows)
    lines = csv.splitlines()
    assert lines[0] == "x,count,main,error,predicted,deviation,normalized"
    cells = lines[1].split(",")
    assert cells[0] == "1024" and cells[1] == "1007"
    assert len(cells) == 7
    for cell in cells:
        assert re.fullmatch(r"-?\d+(\.\d+)?", cell), cell  # plain decimals, no exponents


def test_rows_to_csv_count_reports():
    rep = count_sieve(CYC8, Interval(100, 200))
    csv = rows_to_csv([rep])
    lines = csv.splitlines()
    assert lines[0] == "x,count,main,error,predicted,deviation,normalized"
    cells = lines[1].split(",")
    assert cells[0] == "100" and cells[1] == "97"
    assert cells[6] == ""  # no normalized column for plain counts
    assert rows_to_csv([]) == "x,count,main,error,predicted,deviation,normalized\n"


def test_rows_to_csv_deterministic_bytes():
    c = euler_product(CYC8, 1000)
    a = rows_to_csv(scan_error(CYC8, [64, 128], c, Decimal("0.1")))
    b = rows_to_csv(scan_error(CYC8, [64, 128], c, Decimal("0.1")))
    assert a == b
