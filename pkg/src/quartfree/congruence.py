"""Roots and root counts of quartic congruences, prime classification, support queries."""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _kernels
from .modarith import (
    ConsistencyError,
    QfRep,
    RangeLimitError,
    SingularRootError,
    UnsupportedRamifiedError,
    coeff_tuple,
    cornacchia,
    factorize,
    hensel_lift,
    is_prime,
    jacobi,
    sqrt_mod,
)

# Exhaustive-scan ceiling for root finding mod p and mod p^k (ramified case).
SCAN_LIMIT = 10**6


@dataclass(frozen=True)
class QuarticPoly:
    """Integer polynomial of degree <= 4, coefficients descending (a4, a3, a2, a1, a0)."""

    coeffs: tuple
    label: str = ""

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        if len(c) > 5:
            raise ValueError("degree above 4 is not supported")
        c = (0,) * (5 - len(c)) + c
        if not any(c):
            raise ValueError("polynomial must not be identically zero")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        for i, v in enumerate(self.coeffs):
            if v:
                return 4 - i
        raise AssertionError("unreachable: zero polynomial")

    @property
    def leading_coefficient(self):
        return self.coeffs[4 - self.degree]

    @property
    def is_biquadratic(self):
        a4, a3, a2, a1, a0 = self.coeffs
        return a4 != 0 and a3 == 0 and a1 == 0

    def __call__(self, n):
        acc = 0
        for c in self.coeffs:
            acc = acc * n + c
        return acc

    def derivative_coeffs(self):
        """Descending coefficients of the derivative."""
        return tuple(c * (4 - i) for i, c in enumerate(self.coeffs[:-1]))


NAMED = {
    "cyc8": QuarticPoly((1, 0, 0, 0, 1), label="cyc8"),
    "ferm2": QuarticPoly((1, 0, 0, 0, 2), label="ferm2"),
    "dihed": QuarticPoly((1, 0, -2, 0, 2), label="dihed"),
    "phi5": QuarticPoly((1, 1, 1, 1, 1), label="phi5"),
    "phi12": QuarticPoly((1, 0, -1, 0, 1), label="phi12"),
}


def as_poly(f):
    """Coerce a QuarticPoly, named id, or coefficient sequence to QuarticPoly."""
    if isinstance(f, QuarticPoly):
        return f
    if isinstance(f, str):
        try:
            return NAMED[f]
        except KeyError:
            raise ValueError(f"unknown polynomial id {f!r}") from None
    return QuarticPoly(tuple(f))


@dataclass(frozen=True)
class RootSet:
    """All residues r mod modulus with f(r) = 0, strictly ascending."""

    modulus: int
    roots: tuple

    @property
    def count(self):
        return len(self.roots)


@dataclass(frozen=True)
class PrimeClassification:
    p: int
    residue_class_mod8: int
    rho_p: int
    rho_p2: int
    qf: object  # QfRep or None
    splitting: str  # ramified | split | partial | inert


@dataclass(frozen=True)
class SupportQuery:
    m: int
    in_support: bool
    omega0: int  # prime divisors with 4 roots
    omega1: int  # prime divisors with 2 roots


@dataclass(frozen=True)
class CycloSplit:
    kind: str  # ramified | split-linear | factors
    count: int
    degree: int
    multiplicity: int


def eval_mod(f, n, m):
    """f(n) mod m by Horner."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    acc = 0
    for c in as_poly(f).coeffs:
        acc = (acc * n + c) % m
    return acc


def _sylvester_resultant(fc, gc):
    """Resultant of two polynomials given by descending coefficient tuples."""
    m = len(fc) - 1
    n = len(gc) - 1
    if m < 0 or n < 0:
        raise ValueError("resultant needs nonzero polynomials")
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(n):
        rows.append([0] * i + list(fc) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(gc) + [0] * (size - n - 1 - i))
    mat = [[Fraction(v) for v in row] for row in rows]
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if mat[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, size):
            factor = mat[r][col] * inv
            if factor:
                for c in range(col, size):
                    mat[r][c] -= factor * mat[col][c]
    assert det.denominator == 1
    return int(det)


def _trimmed(f):
    p = as_poly(f)
    return p.coeffs[4 - p.degree :]


@lru_cache(maxsize=4096)
def _disc_cached(coeffs):
    p = QuarticPoly(coeffs)
    d = p.degree
    if d == 1:
        return 1
    fc = _trimmed(p)
    gc = tuple(c * (d - i) for i, c in enumerate(fc[:-1]))
    while gc and gc[0] == 0:
        gc = gc[1:]
    if not gc:
        return 0
    res = _sylvester_resultant(fc, gc)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    num = sign * res
    assert num % p.leading_coefficient == 0
    return num // p.leading_coefficient


def discriminant(f):
    """Discriminant of f via the Sylvester resultant of f and f'."""
    p = as_poly(f)
    if p.degree < 1:
        raise ValueError("discriminant needs degree >= 1")
    return _disc_cached(p.coeffs)


def is_separable(f):
    """True iff gcd(f, f') is constant, i.e. f has no repeated roots."""
    p = as_poly(f)
    if p.degree < 1:
        return True
    return discriminant(p) != 0


def _scan_roots(coeffs, m):
    """All roots of the congruence mod m by exhaustive scan."""
    if m <= 64:
        out = []
        for n in range(m):
            acc = 0
            for c in coeffs:
                acc = (acc * n + c) % m
            if acc == 0:
                out.append(n)
        return tuple(out)
    return tuple(int(r) for r in _kernels.roots_scan(coeffs, m))


def _quadratic_roots(a, b, c, p):
    """Roots of a*y^2 + b*y + c mod odd prime p with p not dividing a."""
    inv2a = pow(2 * a % p, p - 2, p)
    disc = (b * b - 4 * a * c) % p
    sd = sqrt_mod(disc, p)
    if sd is None:
        return []
    ys = {(-b + sd) * inv2a % p, (-b - sd) * inv2a % p}
    return sorted(ys)


def _roots_large_prime(poly, p):
    """Algebraic root construction for p beyond the scan bound."""
    a4, a3, a2, a1, a0 = (c % p for c in poly.coeffs)
    if poly.coeffs == (1, 1, 1, 1, 1):
        # roots are the elements of multiplicative order 5
        if p % 5 != 1:
            return ()
        for a in range(2, 64):
            z = pow(a, (p - 1) // 5, p)
            if z != 1:
                break
        else:
            raise ConsistencyError(f"no order-5 element found mod {p}")
        return tuple(sorted({z, z * z % p, pow(z, 3, p), pow(z, 4, p)}))
    if a4 == 0 and a3 == 0 and a2 == 0:
        if a1 == 0:
            if a0 == 0:
                raise RangeLimitError(
                    f"polynomial vanishes identically mod {p}; root set too large"
                )
            return ()
        return ((-a0) * pow(a1, p - 2, p) % p,)
    if a4 == 0 and a3 == 0:
        return tuple(_quadratic_roots(a2, a1, a0, p))
    if a4 != 0 and a3 == 0 and a1 == 0:
        # biquadratic: substitute y = x^2, then split each y by a square root
        out = set()
        for y in _quadratic_roots(a4, a2, a0, p):
            s = sqrt_mod(y, p)
            if s is not None:
                out.add(s)
                out.add(p - s if s else 0)
        return tuple(sorted(out))
    raise RangeLimitError(
        f"roots mod {p} exceed the scan bound {SCAN_LIMIT} and the polynomial "
        "has no algebraic route (need a biquadratic or phi5 shape)"
    )


@lru_cache(maxsize=65536)
def _roots_mod_p_cached(coeffs, p):
    poly = QuarticPoly(coeffs)
    if p < SCAN_LIMIT:
        roots = _scan_roots(coeffs, p)
    else:
        roots = _roots_large_prime(poly, p)
    for r in roots:
        if eval_mod(poly, r, p) != 0:
            raise ConsistencyError(f"claimed root {r} fails f(r) = 0 mod {p}")
    return roots


def roots_mod_p(f, p):
    """RootSet of f mod a prime p: scan below the bound, algebraic above, verified."""
    poly = as_poly(f)
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return RootSet(p, _roots_mod_p_cached(poly.coeffs, p))


def _is_ramified(poly, p):
    if p == 2:
        return True
    return poly.degree >= 2 and discriminant(poly) % p == 0


@lru_cache(maxsize=65536)
def _roots_mod_pk_cached(coeffs, p, k):
    poly = QuarticPoly(coeffs)
    if k == 1:
        return _roots_mod_p_cached(coeffs, p)
    m = p**k
    if _is_ramified(poly, p) or poly.leading_coefficient % p == 0:
        if m > SCAN_LIMIT:
            raise UnsupportedRamifiedError(
                f"{p}^{k} exceeds the exhaustive bound {SCAN_LIMIT} for a ramified prime"
            )
        return _scan_roots(coeffs, m)
    base = _roots_mod_p_cached(coeffs, p)
    try:
        lifted = sorted(hensel_lift(coeffs, r, p, k) for r in base)
    except SingularRootError:
        if m > SCAN_LIMIT:
            raise UnsupportedRamifiedError(
                f"singular root mod {p} and {p}^{k} exceeds the exhaustive bound"
            ) from None
        return _scan_roots(coeffs, m)
    for r in lifted:
        if eval_mod(poly, r, m) != 0:
            raise ConsistencyError(f"lifted root {r} fails f(r) = 0 mod {p}^{k}")
    return tuple(lifted)


def roots_mod_pk(f, p, k):
    """RootSet mod p^k: Hensel lifts for unramified p, bounded scan otherwise."""
    poly = as_poly(f)
    if k < 1:
        raise ValueError("k must be >= 1")
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return RootSet(p**k, _roots_mod_pk_cached(poly.coeffs, p, k))


def rho(f, m):
    """Root count of f mod m, multiplicative over the prime powers of m."""
    poly = as_poly(f)
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if m == 1:
        return 1
    total = 1
    for p, k in factorize(m):
        total *= len(_roots_mod_pk_cached(poly.coeffs, p, k))
        if total == 0:
            return 0
    return total


def rho_fast(f, p):
    """Root count mod p by residue-class predicates, no scan; ValueError if no fast path."""
    poly = as_poly(f)
    if p == 2:
        return len(_scan_roots(poly.coeffs, 2))
    c = poly.coeffs
    if c == (1, 0, 0, 0, 1):
        return 4 if p % 8 == 1 else 0
    if c == (1, 0, 0, 0, 2):
        if p % 8 == 1:
            return 4 if pow(p - 2, (p - 1) // 4, p) == 1 else 0
        return 2 if p % 8 == 3 else 0
    if c == (1, 0, -2, 0, 2):
        if p % 8 == 1:
            s = sqrt_mod(p - 1, p)
            return 4 if jacobi(1 + s, p) == 1 else 0
        return 2 if p % 8 == 5 else 0
    if c == (1, 1, 1, 1, 1):
        if p == 5:
            return 1
        return 4 if p % 5 == 1 else 0
    if c == (1, 0, -1, 0, 1):
        if p == 3:
            return 0
        return 4 if p % 12 == 1 else 0
    if poly.is_biquadratic and poly.leading_coefficient % p != 0:
        n = 0
        for y in _quadratic_roots(c[0] % p, c[2] % p, c[4] % p, p):
            if y == 0:
                n += 1
            elif jacobi(y, p) == 1:
                n += 2
        return n
    raise ValueError("no fast-path root-count predicate for this polynomial")


def _qf_for_table(poly, p):
    """Quadratic-form representation attached by the per-prime tables, if any."""
    if poly.coeffs == (1, 0, 0, 0, 2):
        if p % 8 == 1:
            return cornacchia(p, 1)
        if p % 8 == 3:
            return cornacchia(p, 2)
    if poly.coeffs == (1, 0, -2, 0, 2) and p % 8 == 1:
        return cornacchia(p, 1)
    return None


def classify_prime(f, p):
    """Per-prime classification: fast-path rho, scan cross-check below the bound, qf."""
    poly = as_poly(f)
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    try:
        fast = rho_fast(poly, p)
    except ValueError:
        fast = None
    if p < SCAN_LIMIT:
        scanned = len(_roots_mod_p_cached(poly.coeffs, p))
        if fast is not None and fast != scanned:
            raise ConsistencyError(
                f"fast-path rho {fast} disagrees with exhaustive scan {scanned} "
                f"for p={p}, poly={poly.coeffs}"
            )
        rho_p = scanned
    elif fast is not None:
        rho_p = fast
    else:
        rho_p = len(_roots_mod_p_cached(poly.coeffs, p))
    rho_p2 = len(_roots_mod_pk_cached(poly.coeffs, p, 2))
    if _is_ramified(poly, p):
        splitting = "ramified"
    elif rho_p == 4:
        splitting = "split"
    elif rho_p == 0:
        splitting = "inert"
    else:
        splitting = "partial"
    return PrimeClassification(
        p=p,
        residue_class_mod8=p % 8,
        rho_p=rho_p,
        rho_p2=rho_p2,
        qf=_qf_for_table(poly, p),
        splitting=splitting,
    )


def in_support(f, m):
    """SupportQuery for m: every prime divisor must have at least one root."""
    poly = as_poly(f)
    if m < 2:
        raise ValueError("support query needs m >= 2")
    omega0 = omega1 = 0
    ok = True
    for p, _ in factorize(m):
        try:
            rp = rho_fast(poly, p)
        except ValueError:
            rp = len(_roots_mod_p_cached(poly.coeffs, p))
        if rp == 0:
            ok = False
        elif rp == 4:
            omega0 += 1
        elif rp == 2:
            omega1 += 1
    return SupportQuery(m=m, in_support=ok, omega0=omega0, omega1=omega1)


def fixed_divisor(f):
    """gcd of all integer values of f, from the first deg+1 sample points."""
    poly = as_poly(f)
    g = 0
    for n in range(poly.degree + 1):
        g = math.gcd(g, poly(n))
    assert g > 0
    return g


def classify_quadratic(g, p):
    """Splitting type of an irreducible quadratic mod p: ramified, split, or inert."""
    poly = as_poly(g)
    if poly.degree != 2:
        raise ValueError("classify_quadratic needs a quadratic polynomial")
    _, _, a, b, c = poly.coeffs
    disc = b * b - 4 * a * c
    if disc >= 0 and math.isqrt(disc) ** 2 == disc:
        raise ValueError("quadratic is reducible over the rationals")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2 or disc % p == 0:
        return "ramified"
    return "split" if jacobi(disc % p, p) == 1 else "inert"


def _poly_mul_asc(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact_asc(num, den):
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        assert c % den[-1] == 0
        q[i] = c // den[-1]
        if q[i]:
            for j, d in enumerate(den):
                num[i + j] -= q[i] * d
    assert not any(num)
    return q


@lru_cache(maxsize=None)
def _cyclotomic_asc(n):
    if n == 1:
        return (-1, 1)
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1, ascending
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact_asc(num, _cyclotomic_asc(d))
    return tuple(num)


def cyclotomic_poly(n):
    """Coefficients (descending) of the n-th cyclotomic polynomial, 1 <= n <= 100."""
    if not 1 <= n <= 100:
        raise ValueError("cyclotomic_poly supports 1 <= n <= 100")
    return tuple(reversed(_cyclotomic_asc(n)))


def _totient(n):
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def _multiplicative_order(a, m):
    if m == 1:
        return 1
    if math.gcd(a, m) != 1:
        raise ValueError("order needs gcd(a, m) = 1")
    x = a % m
    for k in range(1, m + 1):
        if x == 1:
            return k
        x = x * a % m
    raise AssertionError("unreachable: order must divide totient")


def cyclotomic_splitting(n, p):
    """Factorization shape of the n-th cyclotomic polynomial mod p."""
    if not 1 <= n <= 100:
        raise ValueError("cyclotomic_splitting supports 1 <= n <= 100")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n % p == 0:
        m = n
        while m % p == 0:
            m //= p
        d = _multiplicative_order(p, m)
        return CycloSplit(
            kind="ramified",
            count=_totient(m) // d,
            degree=d,
            multiplicity=_totient(n) // _totient(m),
        )
    d = _multiplicative_order(p, n)
    return CycloSplit(
        kind="split-linear" if d == 1 else "factors",
        count=_totient(n) // d,
        degree=d,
        multiplicity=1,
    )


def quartic_residue_3(p):
    """Whether 3 is a fourth power mod p (p = 1 mod 4), with a form cross-check."""
    if p == 3 or p % 4 != 1:
        raise ValueError("quartic_residue_3 needs a prime p = 1 mod 4, p != 3")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    euler = pow(3, (p - 1) // 4, p) == 1
    if p % 8 == 1:
        rep = cornacchia(p, 1)
        form = rep.b % 3 == 0
        if form != euler:
            raise ConsistencyError(
                f"Euler criterion ({euler}) disagrees with the b = 0 mod 3 "
                f"form condition ({form}) at p={p}, rep=({rep.a},{rep.b})"
            )
    return euler
