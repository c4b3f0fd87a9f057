"""Primitive binary quadratic forms ax^2 + bxy + cy^2: composition, reduction,
canonical class representatives and form class groups."""

from math import gcd, isqrt

from .kernel.groups import blackbox_structure


def xgcd(a, b):
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def disc(f):
    a, b, c = f
    return b * b - 4 * a * c


def is_primitive(f):
    return gcd(gcd(f[0], f[1]), f[2]) == 1


def transform(f, m):
    """f(px + qy, rx + sy) for m = ((p, q), (r, s))."""
    a, b, c = f
    (p, q), (r, s) = m
    return (a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s)


def _make_a_positive(f):
    """Properly equivalent form with a > 0."""
    if f[0] > 0:
        return f
    for size in range(1, 200):
        for x in range(-size, size + 1):
            for y in (-size, size) if abs(x) != size else range(-size, size + 1):
                if gcd(x, y) != 1:
                    continue
                a, b, c = f
                if a * x * x + b * x * y + c * y * y > 0:
                    _, v, u = xgcd(x, y)  # x v + y u = 1
                    return transform(f, ((x, -u), (y, v)))
    raise ValueError("form represents no positive integer")


def compose(f1, f2):
    """Composition of two primitive forms of equal discriminant (unreduced)."""
    f1 = _make_a_positive(f1)
    f2 = _make_a_positive(f2)
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    D = disc(f1)
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return (a3, b3, c3)


def _rho_indefinite(f, sqrtD, D):
    a, b, c = f
    ac = abs(c)
    m = 2 * ac
    if ac > sqrtD:
        t = (-b) % m
        if t > ac:
            t -= m
    else:
        # sqrt(D) - 2|c| < t < sqrt(D), t = -b mod 2c
        t = (-b) % m
        lo = sqrtD - m  # D is not a square, so t > sqrt(D) - 2|c| iff t > isqrt(D) - 2|c|
        while t <= lo:
            t += m
        while t - m > lo:
            t -= m
    return (c, t, (t * t - D) // (4 * c))


def _strict(a, b, D):
    # exact check of |sqrt D - 2|a|| < b < sqrt D
    if b <= 0 or b * b >= D:
        return False
    x = 2 * abs(a)
    # sqrt D - x < b  <=>  sqrt D < b + x
    if (b + x) <= 0 or (b + x) ** 2 <= D:
        return False
    # x - sqrt D < b  <=>  x - b < sqrt D
    if x - b >= 0 and (x - b) ** 2 >= D:
        return False
    return True


def reduce_form(f):
    """A reduced form properly equivalent to f."""
    D = disc(f)
    if D < 0:
        a, b, c = f
        if a < 0:
            raise ValueError("negative definite form")
        while True:
            # normalize b into (-a, a]
            m = 2 * a
            b0 = b % m
            if b0 > a:
                b0 -= m
            c = (b0 * b0 - D) // (4 * a)
            b = b0
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return (a, b, c)
    sq = isqrt(D)
    if sq * sq == D:
        raise ValueError("square discriminant")
    for _ in range(100000):
        if _strict(f[0], f[1], D):
            return f
        f = _rho_indefinite(f, sq, D)
    raise RuntimeError("reduction did not terminate")


def cycle(f):
    """The rho-cycle of a reduced indefinite form."""
    D = disc(f)
    sq = isqrt(D)
    out = [f]
    g = _rho_indefinite(f, sq, D)
    while g != f:
        out.append(g)
        g = _rho_indefinite(g, sq, D)
        if len(out) > 10 ** 6:
            raise RuntimeError("cycle too long")
    return out


def canonical(f):
    """Canonical representative of the proper equivalence class of f."""
    r = reduce_form(f)
    if disc(r) < 0:
        return r
    return min(cycle(r))


def principal_form(D):
    b = D % 2
    return (1, b, (b * b - D) // 4)


def reduced_forms(D):
    """All primitive reduced forms of discriminant D."""
    out = []
    if D < 0:
        a = 1
        while 3 * a * a <= -D:
            for b in range(-a + 1, a + 1):
                if (b * b - D) % (4 * a) == 0:
                    c = (b * b - D) // (4 * a)
                    if c >= a and not (a == c and b < 0) and is_primitive((a, b, c)):
                        out.append((a, b, c))
            a += 1
        return out
    sq = isqrt(D)
    for b in range(1, sq + 1):
        if (b - D) % 2:
            continue
        m = (D - b * b) // 4  # = -ac
        for a in range(1, sq + 1):
            if m % a:
                continue
            for sa in (a, -a):
                c = -m // sa
                if _strict(sa, b, D) and is_primitive((sa, b, c)):
                    out.append((sa, b, c))
    return out


def class_number_forms(D):
    """Number of proper equivalence classes of primitive forms of disc D."""
    if D < 0:
        return len(reduced_forms(D))
    seen = set()
    count = 0
    for f in reduced_forms(D):
        if f in seen:
            continue
        count += 1
        seen.update(cycle(f))
    return count


def form_class_group(D):
    """Black-box structure of the form class group of discriminant D."""
    ident = canonical(principal_form(D))
    reps = sorted({canonical(f) for f in reduced_forms(D)})
    return blackbox_structure(reps, lambda x, y: canonical(compose(x, y)), ident,
                              target_order=len(reps))
