"""Shared oracles and the acceptance-checklist reporter."""
from pathlib import Path

_ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    _ACCEPTANCE[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    lines = []
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        lines.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    terminalreporter.section("acceptance checklist")
    for line in lines:
        terminalreporter.write_line(line)
    report = Path(__file__).resolve().parent.parent / "acceptance_report.txt"
    report.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# brute-force oracles, deliberately independent of the package internals


def brute_rho(coeffs, m):
    """Root count of the descending-coefficient polynomial mod m by full scan."""
    count = 0
    for n in range(m):
        acc = 0
        for c in coeffs:
            acc = (acc * n + c) % m
        if acc == 0:
            count += 1
    return count


def brute_squarefree(n):
    """Squarefreeness by trial division, for oracle-sized inputs."""
    if n <= 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        while n % d == 0:
            n //= d
        d += 1
    return True


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p (ascending coefficient lists, reduced mod p)


def _ptrim(a):
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _pmonic(a, p):
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _pmod(a, b, p):
    a = [c % p for c in a]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    _ptrim(a)
    while len(a) - 1 >= db and any(a):
        shift = len(a) - 1 - db
        q = a[-1] * inv % p
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - q * c) % p
        _ptrim(a)
    return a


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pgcd(a, b, p):
    a, b = _ptrim([c % p for c in a]), _ptrim([c % p for c in b])
    while any(b):
        a, b = b, _pmod(a, b, p)
    return _pmonic(a, p)


def _pdiv(a, b, p):
    """Exact quotient a / b mod p."""
    a = _ptrim([c % p for c in a])
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - db)
    while len(a) - 1 >= db and any(a):
        shift = len(a) - 1 - db
        coef = a[-1] * inv % p
        q[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _ptrim(a)
    assert not any(a), "division was not exact"
    return _ptrim(q)


def _pderiv(a, p):
    return _ptrim([(i * c) % p for i, c in enumerate(a)][1:] or [0])


def _ppow_x(e, mod, p):
    """x^e mod (mod, p) by binary exponentiation."""
    result = [1]
    base = _pmod([0, 1], mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _squarefree_part(f, p):
    """(radical, multiplicity) for monic f = radical^multiplicity."""
    mult = 1
    while True:
        d = _pderiv(f, p)
        if not any(d):
            # derivative vanishes: f is a p-th power, shrink exponents by p
            f = _ptrim([f[i] for i in range(0, len(f), p)])
            mult *= p
            continue
        g = _pgcd(f, d, p)
        if len(g) == 1:
            return f, mult
        rad = _pmonic(_pdiv(f, g, p), p)
        k = (len(f) - 1) // (len(rad) - 1)
        check = [1]
        for _ in range(k):
            check = _pmul(check, rad, p)
        assert check == f, "unequal factor multiplicities; not a cyclotomic shape"
        return rad, mult * k


def ddf_counts(coeffs_desc, p):
    """{degree: factor count with multiplicity} of a poly mod p, by
    distinct-degree splitting with gcd(x^(p^d) - x, f)."""
    f = _ptrim([c % p for c in reversed(coeffs_desc)])
    assert len(f) > 1, "constant polynomial"
    f = _pmonic(f, p)
    work, mult = _squarefree_part(f, p)
    counts = {}
    d = 1
    while len(work) - 1 > 0:
        deg = len(work) - 1
        if deg < 2 * d:
            counts[deg] = counts.get(deg, 0) + mult
            break
        xq = _ppow_x(p**d, work, p)
        diff = xq + [0] * (2 - len(xq))
        diff = diff[:]
        diff[1] = (diff[1] - 1) % p
        diff = _ptrim(diff)
        g = _pgcd(work, diff, p) if any(diff) else work[:]
        if len(g) > 1:
            counts[d] = counts.get(d, 0) + mult * ((len(g) - 1) // d)
            work = _pmonic(_pdiv(work, g, p), p) if len(g) < len(work) else [1]
        d += 1
    return counts


def _candidates(d, p):
    for idx in range(p**d):
        cand = []
        v = idx
        for _ in range(d):
            cand.append(v % p)
            v //= p
        cand.append(1)
        yield cand


def _is_irreducible(f, p):
    deg = len(f) - 1
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for cand in _candidates(d, p):
            if not any(_pmod(f, cand, p)):
                return False
    return True


def brute_factor_counts(coeffs_desc, p):
    """Same counts by exhaustive trial division; tiny p and degree only."""
    f = _ptrim([c % p for c in reversed(coeffs_desc)])
    f = _pmonic(f, p)
    counts = {}
    d = 1
    while len(f) - 1 > 0:
        deg = len(f) - 1
        if d > deg // 2:
            counts[deg] = counts.get(deg, 0) + 1
            break
        hit = False
        for cand in _candidates(d, p):
            if not any(_pmod(f, cand, p)) and _is_irreducible(cand, p):
                counts[d] = counts.get(d, 0) + 1
                f = _pmonic(_pdiv(f, cand, p), p)
                hit = True
                break
        if not hit:
            d += 1
    return counts
