"""Vectorized numpy kernels shared by the sieve, counting, and classification paths.

All kernels work on int64 arrays and require every modulus m to satisfy
m*m < 2**63 (m below roughly 3.03e9), so products of two reduced residues
never overflow. Callers enforce the bound.
"""
import math

import numpy as np

INT64_MOD_LIMIT = 3_000_000_000


def sieve_primes(limit):
    """All primes <= limit as an ascending int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def prime_blocks(limit, span=8_000_000):
    """Yield ascending int64 arrays of primes <= limit (segmented for big limits)."""
    if limit < 2:
        return
    if limit <= span:
        yield sieve_primes(limit)
        return
    root = math.isqrt(limit)
    base = sieve_primes(root)
    yield base
    lo = root + 1
    while lo <= limit:
        hi = min(lo + span - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start <= hi:
                mask[start - lo :: p] = False
        yield (np.flatnonzero(mask) + lo).astype(np.int64)
        lo = hi + 1


def v_powmod(base, exp, mod):
    """Vectorized pow(base, exp, mod) for int64 arrays, mod odd or even, mod >= 1."""
    mod = np.asarray(mod, dtype=np.int64)
    out = np.ones(mod.shape, dtype=np.int64)
    np.remainder(out, mod, out=out)
    b = np.remainder(np.asarray(base, dtype=np.int64), mod)
    e = np.broadcast_to(np.asarray(exp, dtype=np.int64), mod.shape).copy()
    active = np.flatnonzero(e > 0)
    while active.size:
        ea = e[active]
        odd = active[(ea & 1).astype(bool)]
        out[odd] = out[odd] * b[odd] % mod[odd]
        b[active] = b[active] * b[active] % mod[active]
        e[active] = ea >> 1
        active = active[ea > 1]
    return out


def v_sqrt_mod(a, p):
    """Vectorized Tonelli-Shanks for odd prime moduli.

    Returns the canonical root min(r, p-r) lane-wise, or -1 where a is a
    quadratic nonresidue. Lanes with a = 0 return 0.
    """
    p = np.asarray(p, dtype=np.int64)
    a = np.remainder(np.asarray(a, dtype=np.int64), p)
    res = np.full(p.shape, -1, dtype=np.int64)
    res[a == 0] = 0
    todo = np.flatnonzero(a != 0)
    if todo.size == 0:
        return res
    ls = v_powmod(a[todo], (p[todo] - 1) >> 1, p[todo])
    todo = todo[ls == 1]
    if todo.size == 0:
        return res
    aa, pp = a[todo], p[todo]

    easy = np.flatnonzero(pp & 3 == 3)
    if easy.size:
        r = v_powmod(aa[easy], (pp[easy] + 1) >> 2, pp[easy])
        res[todo[easy]] = np.minimum(r, pp[easy] - r)

    hard = np.flatnonzero(pp & 3 == 1)
    if hard.size == 0:
        return res
    idx = todo[hard]
    a2, p2 = aa[hard], pp[hard]

    q = p2 - 1
    s = np.zeros(hard.size, dtype=np.int64)
    while True:
        even = np.flatnonzero(q & 1 == 0)
        if even.size == 0:
            break
        q[even] >>= 1
        s[even] += 1

    z = np.full(hard.size, 2, dtype=np.int64)
    while True:
        bad = np.flatnonzero(v_powmod(z, (p2 - 1) >> 1, p2) != p2 - 1)
        if bad.size == 0:
            break
        z[bad] += 1

    c = v_powmod(z, q, p2)
    r = v_powmod(a2, (q + 1) >> 1, p2)
    t = v_powmod(a2, q, p2)
    m = s.copy()
    live = np.flatnonzero(t != 1)
    while live.size:
        pl = p2[live]
        t2 = t[live].copy()
        i = np.zeros(live.size, dtype=np.int64)
        unfinished = np.flatnonzero(t2 != 1)
        while unfinished.size:
            t2[unfinished] = t2[unfinished] * t2[unfinished] % pl[unfinished]
            i[unfinished] += 1
            unfinished = unfinished[t2[unfinished] != 1]
        e = m[live] - i - 1
        b = c[live].copy()
        j = np.flatnonzero(e > 0)
        while j.size:
            b[j] = b[j] * b[j] % pl[j]
            e[j] -= 1
            j = j[e[j] > 0]
        r[live] = r[live] * b % pl
        cc = b * b % pl
        c[live] = cc
        t[live] = t[live] * cc % pl
        m[live] = i
        live = live[t[live] != 1]
    res[idx] = np.minimum(r, p2 - r)
    return res


def roots_scan(coeffs, m):
    """All roots of the polynomial (descending coeffs) mod m by Horner scan."""
    if m >= INT64_MOD_LIMIT:
        raise ValueError(f"scan modulus {m} exceeds the int64-safe bound")
    cs = [c % m for c in coeffs]
    n = np.arange(m, dtype=np.int64)
    acc = np.full(m, cs[0], dtype=np.int64)
    for c in cs[1:]:
        acc *= n
        acc += c
        acc %= m
    return np.flatnonzero(acc == 0).astype(np.int64)


def count_roots_scan(coeffs, m):
    """Root count of the polynomial mod m (same scan, count only)."""
    return int(roots_scan(coeffs, m).size)
