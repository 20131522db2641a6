"""Exact modular and integer arithmetic primitives.

Python integers are unbounded, so the nominal 64/128-bit width contracts of the
callers are satisfied automatically; the vectorized kernels in _kernels carry
their own int64 bounds.
"""
import math
import random
from dataclasses import dataclass

from . import _kernels


class SingularRootError(ArithmeticError):
    """Hensel lift attempted at a root where the derivative vanishes."""


class RangeLimitError(ValueError):
    """Input exceeds a documented range or overflow bound."""


class ExplicitBoundRequired(RangeLimitError):
    """The requested range needs an explicit truncation bound."""


class UnsupportedRamifiedError(RangeLimitError):
    """Ramified prime power beyond the exhaustive-scan bound."""


class ConsistencyError(RuntimeError):
    """Two independent computation paths disagreed; output would be unsafe."""


@dataclass(frozen=True)
class QfRep:
    """Representation p = a^2 + D*b^2."""

    a: int
    b: int
    D: int


def mul_mod(a, b, m):
    """a*b mod m."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    return a * b % m


def pow_mod(a, e, m):
    """a**e mod m by square-and-multiply (the builtin pow)."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    return pow(a, e, m)


def jacobi(a, n):
    """Jacobi symbol (a|n) for odd n >= 1, by the binary reciprocity algorithm."""
    if n < 1 or n % 2 == 0:
        raise ValueError("jacobi symbol needs odd n >= 1")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _sqrt_mod_prime(a, p):
    """Tonelli-Shanks without the primality check; p must be an odd prime."""
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) == -1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return min(r, p - r)


def sqrt_mod(a, p):
    """Square root of a mod an odd prime p, canonical min(r, p-r); None if nonresidue."""
    if p == 2:
        return a % 2
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return _sqrt_mod_prime(a, p)


def quartic_residue(a, p):
    """True iff a is a fourth power mod p, via a^((p-1)/4); requires p = 1 mod 4."""
    if p % 4 != 1:
        raise ValueError("quartic residue symbol needs p = 1 mod 4")
    if math.gcd(a, p) != 1:
        raise ValueError("a must be coprime to p")
    return pow(a, (p - 1) // 4, p) == 1


def _poly_eval(coeffs, n):
    acc = 0
    for c in coeffs:
        acc = acc * n + c
    return acc


def _poly_deriv(coeffs):
    deg = len(coeffs) - 1
    return tuple(c * (deg - i) for i, c in enumerate(coeffs[:-1]))


def coeff_tuple(f):
    """Descending coefficients of f (QuarticPoly or any coefficient sequence)."""
    return tuple(int(c) for c in getattr(f, "coeffs", f))


def hensel_lift(f, r, p, k):
    """Unique root of f mod p^k over a simple root r mod p, by Newton doubling."""
    coeffs = coeff_tuple(f)
    if k < 1:
        raise ValueError("k must be >= 1")
    if _poly_eval(coeffs, r) % p != 0:
        raise ValueError(f"{r} is not a root of f mod {p}")
    deriv = _poly_deriv(coeffs)
    if _poly_eval(deriv, r) % p == 0:
        raise SingularRootError(f"derivative vanishes at root {r} mod {p}")
    mod, target = p, p**k
    x = r % p
    while mod < target:
        mod = min(mod * mod, target)
        fx = _poly_eval(coeffs, x)
        dx = _poly_eval(deriv, x) % mod
        x = (x - fx * pow(dx, -1, mod)) % mod
    return x


def crt_combine(r1, m1, r2, m2):
    """Unique x mod m1*m2 with x = r1 mod m1 and x = r2 mod m2."""
    if math.gcd(m1, m2) != 1:
        raise ValueError("moduli must be coprime")
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _miller_rabin(n, a):
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _lucas_strong(n):
    """Strong Lucas probable-prime test with Selfridge parameters."""
    D = 5
    while True:
        j = jacobi(D % n, n)
        if j == -1:
            break
        if j == 0:
            return n == abs(D)
        if abs(D) > 50 and int_sqrt(n) ** 2 == n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    Q = (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    U, V, Qk = 0, 2, 1
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (U + V) * inv2 % n, (D * U + V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n):
    """Exact below 2^64 (fixed Miller-Rabin witness set); MR + strong Lucas above."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n < 1 << 64:
        return all(_miller_rabin(n, a) for a in _MR_WITNESSES)
    if not all(_miller_rabin(n, a) for a in _MR_WITNESSES):
        return False
    if not _lucas_strong(n):
        return False
    rnd = random.Random(n)
    return all(_miller_rabin(n, rnd.randrange(2, n - 1)) for _ in range(48))


_TRIAL_PRIMES = None


def _trial_primes():
    global _TRIAL_PRIMES
    if _TRIAL_PRIMES is None:
        _TRIAL_PRIMES = [int(p) for p in _kernels.sieve_primes(10**4)]
    return _TRIAL_PRIMES


def _brent_rho(n, c):
    """One Brent cycle with increment constant c; batch gcd every 128 steps."""
    y, r, q, g = c, 1, 1, 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(128, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += 128
        r <<= 1
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


def factorize(n):
    """Complete factorization of n >= 1 as a sorted list of (prime, exponent)."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = int_sqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        c = 1
        while True:
            g = _brent_rho(m, c)
            if 1 < g < m:
                break
            c += 1
        stack += [g, m // g]
    return sorted(out.items())


def is_squarefree(n):
    """mu^2(n) as a boolean: n has no repeated prime factor."""
    if n < 1:
        raise ValueError("is_squarefree needs n >= 1")
    return all(e == 1 for _, e in factorize(n))


def cornacchia(p, D):
    """Solve a^2 + D*b^2 = p for an odd prime p, 1 <= D < p; None if no solution.

    For D = 1 the returned pair is normalized with a odd (and b even), which
    picks one of the two symmetric representations deterministically.
    """
    if not 1 <= D < p:
        raise ValueError("cornacchia needs 1 <= D < p")
    t = sqrt_mod((-D) % p, p)
    if t is None:
        return None
    lim = int_sqrt(p)
    for t0 in sorted({t, p - t}):
        a, b = p, t0
        while b > lim:
            a, b = b, a % b
        rem = p - b * b
        if b == 0 or rem % D:
            continue
        s2, s = rem // D, int_sqrt(rem // D)
        if s * s != s2:
            continue
        x, y = b, s
        if D == 1 and x % 2 == 0:
            x, y = y, x
        return QfRep(x, y, D)
    return None


def primes_in_ap(q, a, limit):
    """All primes p <= limit with p = a mod q, ascending, by segmented sieve."""
    if math.gcd(q, a) != 1:
        raise ValueError("need gcd(q, a) = 1")
    out = []
    target = a % q
    for block in _kernels.prime_blocks(limit):
        for p in block[block % q == target]:
            out.append(int(p))
    return out


def int_sqrt(n):
    """Largest s with s*s <= n."""
    if n < 0:
        raise ValueError("int_sqrt needs n >= 0")
    return math.isqrt(n)
