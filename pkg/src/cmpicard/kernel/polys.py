"""Dense univariate polynomials, coefficient lists from low to high degree."""

from .linalg import det


class RamifiedPrimeError(ValueError):
    pass


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def derivative(f):
    return [i * c for i, c in enumerate(f)][1:]


def resultant(f, g):
    f, g = trim(f), trim(g)
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(n):
        row = [0] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [0] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return det(rows)


def discriminant(f):
    f = trim(f)
    n = len(f) - 1
    lead = f[-1]
    r = resultant(f, derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r // lead


def evaluate(f, x, p=None):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
        if p:
            acc %= p
    return acc


def _mod(f, p):
    return trim([c % p for c in f])


def polydivmod(a, b, p):
    a, b = _mod(a, p), _mod(b, p)
    if not b:
        raise ZeroDivisionError
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bc) % p
        a = trim(a)
    return trim(q), a


def polymulmod(a, b, f, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return polydivmod(prod, f, p)[1]


def polypowmod(base, e, f, p):
    result = [1]
    base = polydivmod(base, f, p)[1]
    while e:
        if e & 1:
            result = polymulmod(result, base, f, p)
        base = polymulmod(base, base, f, p)
        e >>= 1
    return result


def polygcd(a, b, p):
    a, b = _mod(a, p), _mod(b, p)
    while b:
        a, b = b, polydivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def splits_completely_mod_p(f, p):
    """True iff the monic integer polynomial f has deg f distinct roots mod p."""
    f = trim(f)
    if f[-1] != 1:
        raise ValueError("polynomial must be monic")
    if discriminant(f) % p == 0:
        raise RamifiedPrimeError(f"{p} divides disc(f)")
    n = len(f) - 1
    if n <= 1:
        return True
    xp = polypowmod([0, 1], p, f, p)
    h = list(xp) + [0] * max(0, 2 - len(xp))
    h[1] = (h[1] - 1) % p
    g = polygcd(f, trim(h), p)
    return len(g) - 1 == n


def roots_mod_p(f, p):
    """Roots of f mod p by exhaustive evaluation (small p only)."""
    return [x for x in range(p) if evaluate(f, x, p) == 0]
