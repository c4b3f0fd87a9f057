"""Exact integer and rational matrix routines.

Matrices are plain lists of rows.  Lattices are described by the rows of a
basis matrix; all normal forms here are row-style.
"""

from fractions import Fraction
from math import gcd


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def vecmat(v, m):
    """Row vector times matrix."""
    out = [0] * len(m[0])
    for c, row in zip(v, m):
        if c:
            for j, x in enumerate(row):
                out[j] += c * x
    return out


def det(m):
    """Determinant by fraction-free Bareiss elimination (exact)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_det(m):
    n = len(m)
    a = [[Fraction(x) for x in r] for r in m]
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            d = -d
        d *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return d


def rational_inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [r[n:] for r in a]


def solve_rational(m, v):
    """Solve x·m = v for the row vector x (m square, invertible)."""
    inv = rational_inverse(m)
    return vecmat([Fraction(x) for x in v], inv)


def hnf(rows):
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows: upper-echelon, positive pivots, entries above
    each pivot reduced into [0, pivot).
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in a if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            new = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col] != 0:
                    new.append(r)
                elif any(r):
                    rest.append(r)
            nz = new
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        a = rest
        col += 1
    # reduce above pivots
    for i in range(len(out)):
        pc = next(j for j, x in enumerate(out[i]) if x)
        piv = out[i][pc]
        for k in range(i):
            q = out[k][pc] // piv
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def integer_kernel(rows):
    """Z-basis of {c : sum c_i rows[i] = 0} (the left kernel)."""
    n = len(rows)
    m = len(rows[0])
    aug = [list(r) + [1 if j == i else 0 for j in range(n)] for i, r in enumerate(rows)]
    return [r[m:] for r in hnf(aug) if not any(r[:m])]


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_modular(rows, D):
    """Hermite form of the lattice spanned by ``rows`` and D*Z^n (D > 0).

    Same output as hnf when the lattice already contains D*Z^n; entries stay
    bounded by D throughout.
    """
    n = len(rows[0])
    a = [[x % D for x in r] for r in rows]
    out = []
    for col in range(n):
        p = [0] * n
        p[col] = D
        rest = []
        for r in a:
            if r[col] == 0:
                if any(r):
                    rest.append(r)
                continue
            g, x, y = _xgcd(p[col], r[col])
            u, v = r[col] // g, p[col] // g
            newp = [(x * s + y * t) % D if j > col else x * s + y * t for j, (s, t) in enumerate(zip(p, r))]
            newr = [(u * s - v * t) % D for s, t in zip(p, r)]
            p = newp
            if any(newr):
                rest.append(newr)
        out.append(p)
        a = rest
    for i in range(n):
        piv = out[i][i]
        for k in range(i):
            q = out[k][i] // piv
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def pivots(h):
    return [next(j for j, x in enumerate(r) if x) for r in h]


def reduce_mod_hnf(v, h):
    """Canonical representative of ``v`` modulo the full-rank lattice ``h``."""
    v = list(v)
    for r in h:
        pc = next(j for j, x in enumerate(r) if x)
        q = v[pc] // r[pc]
        if q:
            v = [x - q * y for x, y in zip(v, r)]
    return v


def in_lattice(v, h):
    """Membership of an integer vector in the lattice with HNF rows ``h``."""
    return not any(reduce_mod_hnf(v, h)) if h else not any(v)


def lattice_coords(v, h):
    """Integer coordinates of ``v`` in the HNF basis ``h`` or None."""
    v = list(v)
    coords = []
    for r in h:
        pc = next(j for j, x in enumerate(r) if x)
        q, rem = divmod(v[pc], r[pc])
        if rem:
            return None
        coords.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, r)]
    return coords if not any(v) else None


def common_denominator(rows):
    den = 1
    for r in rows:
        for x in r:
            x = Fraction(x)
            den = den * x.denominator // gcd(den, x.denominator)
    return den


def rational_hnf(rows):
    """HNF of a rational lattice: returns (den, integer HNF) with lattice = HNF/den."""
    den = common_denominator(rows)
    ints = [[int(Fraction(x) * den) for x in r] for r in rows]
    return den, hnf(ints)


def dual_basis(rows):
    """Rows of the dual lattice basis for a square full-rank basis."""
    return transpose(rational_inverse(rows))


def lattice_intersection(a, b):
    """Intersection of two full-rank integer lattices given by basis rows."""
    da, db = dual_basis(a), dual_basis(b)
    den, s = rational_hnf(da + db)
    back = dual_basis([[Fraction(x, den) for x in r] for r in s])
    d2, out = rational_hnf(back)
    assert d2 == 1
    return out


def smith_normal_form(m):
    """Return (U, D, V) with U·m·V = D, U and V unimodular, D in Smith form."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot of minimal nonzero absolute value in the trailing block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // a[t][t])
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // a[t][t])
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility: fold offending row into the pivot row
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if a[i][j] % a[t][t]:
                            add_row(t, i, -1)
                            done = False
                            break
                    if not done:
                        break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


def elementary_divisors(m):
    """Nonzero diagonal of the Smith form (divisibility chain)."""
    if not m or not m[0]:
        return []
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i]]


FLOAT_SAFE = 2 ** 40


def _gso(g):
    n = len(g)
    mu = [[0.0] * n for _ in range(n)]
    bstar = [0.0] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j] - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
            mu[i][j] = s / bstar[j] if bstar[j] else 0.0
        bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
    return mu, bstar


def lll_gram(gram, delta=0.99):
    """LLL-reduce a basis described only by its Gram matrix.

    Returns the integer transform T (rows are new basis vectors in old
    coordinates).  Integer or Fraction input too large for doubles is
    reduced exactly, anything else in floating point.
    """
    n = len(gram)
    t = identity(n)
    exact = (all(isinstance(x, (int, Fraction)) for r in gram for x in r)
             and max(abs(x) for r in gram for x in r) > FLOAT_SAFE)
    conv = Fraction if exact else float
    if exact:
        delta = Fraction(delta).limit_denominator(1000)
    g = [list(map(conv, r)) for r in gram]
    mu, bstar = _gso(g)
    k = 1
    iters = 0
    while k < n and iters < 100000:
        iters += 1
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                t[k] = [x - q * y for x, y in zip(t[k], t[j])]
                # b_k <- b_k - q b_j on the Gram matrix
                gkj, gjj = g[k][j], g[j][j]
                for i in range(n):
                    g[k][i] -= q * g[j][i]
                g[k][k] = g[k][k] + q * q * gjj - q * gkj
                for i in range(n):
                    g[i][k] = g[k][i]
                mu[k][j] -= q
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            t[k], t[k - 1] = t[k - 1], t[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for r in g:
                r[k], r[k - 1] = r[k - 1], r[k]
            mu, bstar = _gso(g)
            k = max(k - 1, 1)
    return t
