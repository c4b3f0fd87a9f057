"""The real quadratic field K = Q(sqrt d) with integral basis (1, w).

Elements are pairs (a, b) meaning a + b*w, with integer or Fraction entries.
w satisfies w^2 = t*w - n, where (t, n) = (1, (1-d)/4) or (0, -d).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import mpmath

from .errors import DomainError, UnsupportedBaseError
from .forms import canonical, form_class_group, principal_form
from .kernel.groups import AbelianGroupPresentation, image_order_of_multiplication, quotient_by_subgroup
from .kernel.integers import is_squarefree, legendre
from .kernel.linalg import hnf
from .kernel.shortvec import short_vectors


@dataclass(frozen=True)
class KIdeal:
    """Integral O_K-ideal by its Hermite basis in (1, w) coordinates."""

    basis: tuple
    norm: int = field(init=False)

    def __post_init__(self):
        rows = hnf([list(r) for r in self.basis])
        if len(rows) != 2:
            raise DomainError("ideal basis must have rank 2")
        object.__setattr__(self, "basis", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "norm", rows[0][0] * rows[1][1])

    def contains(self, x):
        (a, b), (_, c) = self.basis
        if Fraction(x[0]) % a:
            return False
        k = Fraction(x[0]) // a
        return (Fraction(x[1]) - k * b) % c == 0


@dataclass(frozen=True)
class RealQuadraticField:
    d: int
    discriminant: int
    t: int
    n: int
    fundamental_unit: tuple
    unit_norm: int
    class_number: int
    narrow_class_number: int
    narrow_class_group: AbelianGroupPresentation = field(compare=False, repr=False)
    class_group: AbelianGroupPresentation = field(compare=False, repr=False)

    @property
    def integral_basis(self):
        return ((1, 0), (0, 1))

    @property
    def omega_min_poly(self):
        """Coefficients (low to high) of the minimal polynomial of w."""
        return [self.n, -self.t, 1]

    # arithmetic on pairs
    def mul(self, x, y):
        a, b = x
        c, e = y
        return (a * c - self.n * b * e, a * e + b * c + self.t * b * e)

    def add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def neg(self, x):
        return (-x[0], -x[1])

    def conj(self, x):
        a, b = x
        return (a + self.t * b, -b)

    def norm(self, x):
        a, b = x
        return a * a + self.t * a * b + self.n * b * b

    def trace(self, x):
        return 2 * x[0] + self.t * x[1]

    def inverse(self, x):
        nx = Fraction(self.norm(x))
        c = self.conj(x)
        return (c[0] / nx, c[1] / nx)

    def power(self, x, k):
        if k < 0:
            x, k = self.inverse(x), -k
        out = (1, 0)
        while k:
            if k & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            k >>= 1
        return out

    def is_integral(self, x):
        return all(Fraction(c).denominator == 1 for c in x)

    def divides(self, x, y):
        """x | y in O_K (x nonzero)."""
        q = self.mul(y, self.inverse(x))
        return self.is_integral(q)

    def sqrt_d(self, prec=None):
        if prec is None:
            return mpmath.sqrt(self.d)
        with mpmath.workprec(prec):
            return mpmath.sqrt(self.d)

    def embed(self, x, i=0):
        """Real embedding i in {0, 1}; embedding 0 sends sqrt d to the positive root."""
        s = mpmath.sqrt(self.d) * (1 if i == 0 else -1)
        w = (self.t + s) / 2 if self.t else s
        return mpmath.mpf(Fraction(x[0]).numerator) / Fraction(x[0]).denominator + \
            mpmath.mpf(Fraction(x[1]).numerator) / Fraction(x[1]).denominator * w

    def embed_float(self, x, i=0):
        s = self.d ** 0.5 * (1 if i == 0 else -1)
        w = (self.t + s) / 2 if self.t else s
        return float(x[0]) + float(x[1]) * w

    def is_totally_negative(self, x):
        # a + b w negative under both embeddings, decided exactly
        return self.trace(x) < 0 and self.norm(x) > 0

    def is_totally_positive(self, x):
        return self.trace(x) > 0 and self.norm(x) > 0

    def sign_at(self, x, i):
        """Exact sign of embedding i of x."""
        # x = u + v sqrt(d) with u, v rational
        u = Fraction(x[0]) + Fraction(self.t * x[1], 2)
        v = Fraction(x[1], 2) if self.t else Fraction(x[1])
        if i == 1:
            v = -v
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return (v > 0) - (v < 0)
        if (u > 0) == (v > 0):
            return 1 if u > 0 else -1
        # opposite signs: compare u^2 with d v^2
        big_u = u * u > self.d * v * v
        return (1 if u > 0 else -1) if big_u else (1 if v > 0 else -1)

    # ideals
    def principal_ideal(self, x):
        x = tuple(int(c) for c in x)
        if x == (0, 0):
            raise DomainError("zero ideal")
        return KIdeal((x, self.mul(x, (0, 1))))

    def ideal_from_gens(self, gens):
        rows = []
        for g in gens:
            rows.append(list(g))
            rows.append(list(self.mul(g, (0, 1))))
        return KIdeal(tuple(tuple(r) for r in hnf(rows)))

    def ideal_mul(self, a, b):
        return self.ideal_from_gens([self.mul(x, y) for x in a.basis for y in b.basis])

    def residue_symbol(self, p):
        """Kronecker symbol (disc/p): 1 split, -1 inert, 0 ramified."""
        D = self.discriminant
        if p == 2:
            if D % 2 == 0:
                return 0
            return 1 if D % 8 == 1 else -1
        return legendre(D, p)

    def primes_above(self, p):
        """List of (ideal, e, f) for the primes of O_K over the rational prime p."""
        s = self.residue_symbol(p)
        if s == -1:
            return [(self.principal_ideal((p, 0)), 1, 2)]
        roots = [r for r in range(p) if (r * r - self.t * r + self.n) % p == 0]
        ideals = [self.ideal_from_gens([(p, 0), (-r, 1)]) for r in roots]
        if s == 0:
            return [(ideals[0], 2, 1)]
        return [(ideals[0], 1, 1), (ideals[1], 1, 1)]

    def generator(self, ideal):
        """A generator of a principal ideal (requires h(K) = 1 or principality)."""
        N = ideal.norm
        eps = self.embed_float(self.fundamental_unit, 0)
        rows = ideal.basis
        emb = [[self.embed_float(r, i) for i in range(2)] for r in rows]
        gram = [[sum(emb[a][k] * emb[b][k] for k in range(2)) for b in range(2)] for a in range(2)]
        bound = N * (eps + 1 / eps) * 1.0001 + 1
        best = None
        for v in short_vectors(gram, bound):
            x = (v[0] * rows[0][0] + v[1] * rows[1][0], v[0] * rows[0][1] + v[1] * rows[1][1])
            if abs(self.norm(x)) == N:
                key = (abs(x[0]) + abs(x[1]), x)
                if best is None or key < best[0]:
                    best = (key, x)
        if best is None:
            raise UnsupportedBaseError("ideal is not principal")
        return best[1]


def fundamental_unit_cf(d, t, n):
    """Fundamental unit > 1 from the continued fraction expansion of w."""
    # w = (P + sqrt(d)) / Q
    P, Q = (1, 2) if t else (0, 1)
    s = isqrt(d)
    pm, qm, pk1, qk1 = 0, 1, 1, 0  # convergents k-2 and k-1
    for _ in range(100000):
        a = (P + s) // Q
        pk = a * pk1 + pm
        qk = a * qk1 + qm
        pm, qm, pk1, qk1 = pk1, qk1, pk, qk
        x = (pk, -qk)
        nx = pk * pk - t * pk * qk + n * qk * qk
        if abs(nx) == 1:
            return _normalize_unit(x, d, t, n), nx
        P = a * Q - P
        Q = (d - P * P) // Q
    raise RuntimeError("continued fraction did not reach a unit")


def _normalize_unit(x, d, t, n):
    """Among +-x, +-conj(x) the one exceeding 1 in the first embedding."""
    a, b = x
    conj = (a + t * b, -b)
    w = (t + d ** 0.5) / 2 if t else d ** 0.5
    cands = [x, (-a, -b), conj, (-conj[0], -conj[1])]
    return max(cands, key=lambda u: u[0] + u[1] * w)


def make_real_quadratic(d):
    if not isinstance(d, int) or d <= 1 or not is_squarefree(d):
        raise DomainError(f"d must be a squarefree integer > 1, got {d}")
    if d % 4 == 1:
        t, n, D = 1, (1 - d) // 4, d
    else:
        t, n, D = 0, -d, 4 * d
    unit, unit_norm = fundamental_unit_cf(d, t, n)
    narrow = form_class_group(D)
    # the class of (-1, b, -c) is the image of principal ideals with a
    # generator of negative norm; Pic is the narrow group modulo it
    a, b, c = principal_form(D)
    neg = canonical((-a, b, -c))
    coord = narrow.coordinate(neg)
    pres = narrow.presentation
    wide = quotient_by_subgroup(pres, [coord]) if pres.rank else pres
    h_plus = pres.order
    h = wide.order
    if h_plus != (h if unit_norm == -1 else 2 * h):
        raise AssertionError("narrow class number inconsistent with unit norm")
    return RealQuadraticField(d, D, t, n, unit, unit_norm, h, h_plus, pres, wide)


def narrow_pi0_counts(K):
    """(|Pic^+|, |Pic^+ / 2 Pic|) for O_K."""
    doubles = image_order_of_multiplication(K.class_group, 2)
    return K.narrow_class_number, K.narrow_class_number // doubles


def different_ideal(K):
    """The different of O_K over Z, generated by 2w - t."""
    return K.principal_ideal((-K.t, 2))
