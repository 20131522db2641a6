"""Density constants c_f = prod_p (1 - rho_f(p^2)/p^2) with rigorous enclosures."""
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

from . import _kernels
from .congruence import (
    _roots_mod_p_cached,
    _roots_mod_pk_cached,
    as_poly,
    discriminant,
    is_separable,
    rho_fast,
)
from .modarith import factorize

PRECISION = 50
_CTX_POINT = Context(prec=PRECISION, rounding=ROUND_HALF_EVEN)
_CTX_DOWN = Context(prec=PRECISION, rounding=ROUND_FLOOR)
_CTX_UP = Context(prec=PRECISION, rounding=ROUND_CEILING)
_ONE = Decimal(1)


@dataclass(frozen=True)
class LocalFactor:
    """Exact per-prime factor 1 - rho_f(p^2)/p^2."""

    p: int
    rho_p2: int
    factor: Fraction


@dataclass(frozen=True)
class DensityEstimate:
    point: Decimal
    lower: Decimal
    upper: Decimal
    truncation_bound: int
    factors_used: int

    def as_dict(self):
        return {
            "point": str(self.point),
            "lower": str(self.lower),
            "upper": str(self.upper),
            "truncation_bound": self.truncation_bound,
            "factors_used": self.factors_used,
        }


def _require_separable(f):
    poly = as_poly(f)
    if not is_separable(poly):
        raise ValueError("density requires a separable polynomial (no repeated roots)")
    return poly


def _rho_p2(poly, p):
    """rho_f(p^2): scan for ramified p, fast predicate or root count otherwise."""
    if p == 2 or (poly.degree >= 2 and discriminant(poly) % p == 0):
        return len(_roots_mod_pk_cached(poly.coeffs, p, 2))
    try:
        return rho_fast(poly, p)
    except ValueError:
        return len(_roots_mod_p_cached(poly.coeffs, p))


def local_factor(f, p):
    """LocalFactor at p; rho at p^2 equals rho at p away from ramification."""
    poly = _require_separable(f)
    r = _rho_p2(poly, p)
    return LocalFactor(p=p, rho_p2=r, factor=1 - Fraction(r, p * p))


class _Accumulator:
    """Three-track product accumulation with directed rounding.

    Factors are batched as an exact integer fraction and flushed to the decimal
    tracks in chunks, so each directed rounding happens once per chunk.
    """

    _CHUNK = 32

    def __init__(self):
        self.point = _ONE
        self.down = _ONE
        self.up = _ONE
        self.used = 0
        self._num = 1
        self._den = 1
        self._pending = 0

    def multiply(self, rho_p2, p):
        if rho_p2 == 0:
            return
        p2 = p * p
        self._num *= p2 - rho_p2
        self._den *= p2
        self._pending += 1
        self.used += 1
        if self._pending >= self._CHUNK:
            self._flush()

    def _flush(self):
        if not self._pending:
            return
        num, den = Decimal(self._num), Decimal(self._den)
        self.point = _CTX_POINT.multiply(self.point, _CTX_POINT.divide(num, den))
        self.down = _CTX_DOWN.multiply(self.down, _CTX_DOWN.divide(num, den))
        self.up = _CTX_UP.multiply(self.up, _CTX_UP.divide(num, den))
        self._num = self._den = 1
        self._pending = 0

    def finish(self, P):
        # tail: 0 <= -sum_{p>P} ln(1 - rho/p^2) <= sum_{p>P} (4/p^2 + 16/p^4) <= 5/P
        self._flush()
        t = _CTX_DOWN.divide(Decimal(-5), Decimal(P))
        lower = _CTX_DOWN.multiply(self.down, t.exp(_CTX_DOWN))
        return lower, self.up


def _accumulate(poly, P, classes=None, exclusions=frozenset()):
    acc = _Accumulator()
    exclusions = frozenset(exclusions)
    for block in _kernels.prime_blocks(P):
        for p_ in block:
            p = int(p_)
            if classes is not None and p % 8 not in classes:
                continue
            if p in exclusions:
                continue
            acc.multiply(_rho_p2(poly, p), p)
    # fold in any ramified primes beyond P exactly, so the unramified-only tail
    # bound (rho <= 4 per prime square) stays valid for arbitrary polynomials
    if poly.degree >= 2:
        for q, _ in factorize(abs(2 * discriminant(poly))):
            if q > P and (classes is None or q % 8 in classes) and q not in exclusions:
                acc.multiply(_rho_p2(poly, q), q)
    lower, upper = acc.finish(P)
    return DensityEstimate(
        point=acc.point,
        lower=lower,
        upper=upper,
        truncation_bound=P,
        factors_used=acc.used,
    )


def euler_product(f, P):
    """Truncated density product over all primes p <= P with a tail enclosure."""
    poly = _require_separable(f)
    if P < 3:
        raise ValueError("truncation bound must be at least 3")
    return _accumulate(poly, P)


def euler_product_restricted(f, P, classes, exclusions=frozenset()):
    """Truncated product restricted to residue classes mod 8, minus excluded primes."""
    poly = _require_separable(f)
    if P < 3:
        raise ValueError("truncation bound must be at least 3")
    classes = None if classes is None else frozenset(classes)
    return _accumulate(poly, P, classes, frozenset(exclusions))


def _halved(est):
    two = Decimal(2)
    return DensityEstimate(
        point=_CTX_POINT.divide(est.point, two),
        lower=_CTX_DOWN.divide(est.lower, two),
        upper=_CTX_UP.divide(est.upper, two),
        truncation_bound=est.truncation_bound,
        factors_used=est.factors_used,
    )


def density_variants(f, P):
    """The four product variants behind the published-constant adjudication."""
    full = euler_product(f, P)
    excl5 = euler_product_restricted(f, P, None, {5})
    return {
        "full": full,
        "excl5": excl5,
        "half_full": _halved(full),
        "half_excl5": _halved(excl5),
    }
