"""The Hecke correspondence T_p for GL_2 over O_K at an unramified prime p.

Lattices are handled place by place.  At each place v over p the ring O_v is
a DVR with uniformizer p, and a lattice in K_v^2 has a unique Hermite basis
(p^a, c), (0, p^b) with c taken mod p^b.  A lattice class is the tuple of
these (a, c, b) modulo a common power of p.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm

from .errors import DomainError, InvalidComplexStructureError, NotInGPrimeError, PrecisionError
from .kernel.groups import ResourceError
from .residue import ResidueField

ORBIT_VERTEX_CAP = 2_000_000


# --- places and residue rings --------------------------------------------------
@dataclass(frozen=True)
class Place:
    kind: str  # "split" or "inert"
    root: int  # image of w in F_p for a split place, None if inert


@lru_cache(maxsize=None)
def places(K, p):
    s = K.residue_symbol(p)
    if s == 0:
        raise DomainError(f"p = {p} is ramified in Q(sqrt {K.d})")
    if s == -1:
        return (Place("inert", None),)
    roots = sorted(r for r in range(p) if (r * r - K.t * r + K.n) % p == 0)
    return tuple(Place("split", r) for r in roots)


def _residue(K, p, v):
    return ResidueField(K, p, 1, v.root) if v.kind == "split" else ResidueField(K, p, 2)


def _local_p1(F):
    return [(F.one, y) for y in F.elements()] + [(F.zero, F.one)]


def _normalize_local(F, x, y):
    if x != F.zero:
        return F.one, F.mul(y, F.inv(x))
    if y == F.zero:
        raise DomainError("pair is not unimodular")
    return F.zero, F.one


def _crt(K, p, pl, comps):
    """Element of O_K / p (as a pair) with the given residues at the places."""
    if len(pl) == 1:
        return tuple(c % p for c in comps[0])
    (z1, z2), (r1, r2) = comps, (pl[0].root, pl[1].root)
    b = (z1 - z2) * pow(r1 - r2, -1, p) % p
    return ((z1 - b * r1) % p, b)


@dataclass(frozen=True, order=True)
class P1Point:
    """A free rank-one submodule of (O_K/p)^2 by a normalized generator (x, y)."""

    x: tuple
    y: tuple


def _point(K, p, pl, local):
    xs = [pt[0] for pt in local]
    ys = [pt[1] for pt in local]
    return P1Point(_crt(K, p, pl, xs), _crt(K, p, pl, ys))


def _components(K, p, pl, z):
    return [_residue(K, p, v).reduce(z) for v in pl]


def p1_normalize(K, p, x, y):
    """The normalized generator of the line through the unimodular pair (x, y)."""
    pl = places(K, p)
    local = []
    for v, a, b in zip(pl, _components(K, p, pl, x), _components(K, p, pl, y)):
        local.append(_normalize_local(_residue(K, p, v), a, b))
    return _point(K, p, pl, local)


def p1_set(K, p):
    pl = places(K, p)
    per_place = [_local_p1(_residue(K, p, v)) for v in pl]
    return sorted(_point(K, p, pl, local) for local in product(*per_place))


def p1_size(K, p):
    """Closed form: (p + 1)^2 when p splits, p^2 + 1 when p is inert."""
    return (p + 1) ** 2 if len(places(K, p)) == 2 else p * p + 1


def sl2_transitive(K, p):
    """Is the orbit of (1 : 0) under the elementary matrices over O_K/p all of P^1?"""
    pl = places(K, p)
    fields = [_residue(K, p, v) for v in pl]
    gens = [tuple(F.reduce(r) for F in fields) for r in ((1, 0), (0, 1))]

    def act(point, r, upper):
        out = []
        for F, (x, y), rv in zip(fields, point, r):
            if upper:
                x = F.add(x, F.mul(rv, y))
            else:
                y = F.add(y, F.mul(rv, x))
            out.append(_normalize_local(F, x, y))
        return tuple(out)

    start = tuple((F.one, F.zero) for F in fields)
    seen = {start}
    frontier = [start]
    while frontier:
        new = []
        for pt in frontier:
            for r in gens:
                for upper in (True, False):
                    q = act(pt, r, upper)
                    if q not in seen:
                        seen.add(q)
                        new.append(q)
        frontier = new
    return len(seen) == p1_size(K, p)


# --- lattice classes --------------------------------------------------------
def _val_int(c, p):
    if c == 0:
        return None
    k = 0
    while c % p == 0:
        c //= p
        k += 1
    return k


def _val(c, p):
    vals = [_val_int(x, p) for x in (c if isinstance(c, tuple) else (c,))]
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def _cmap(c, f):
    return tuple(f(x) for x in c) if isinstance(c, tuple) else f(c)


@dataclass(frozen=True, order=True)
class LatticeClass:
    """Local Hermite data (a, c, b) at each place over p, up to a common p-power."""

    p: int
    vertices: tuple

    @property
    def exponents(self):
        """Elementary divisor exponents (e1 <= e2) of each local lattice in O_v^2."""
        out = []
        for a, c, b in self.vertices:
            vc = _val(c, self.p)
            e1 = min(a, b) if vc is None else min(a, b, vc)
            out.append((e1, a + b - e1))
        return tuple(out)

    def satisfies_det_condition(self):
        return len({e1 + e2 for e1, e2 in self.exponents}) == 1


def _content(vertex, p):
    a, c, b = vertex
    vc = _val(c, p)
    return min(a, b) if vc is None else min(a, b, vc)


def _normalized(p, verts):
    k = min(_content(v, p) for v in verts)
    if k == 0:
        return LatticeClass(p, tuple(verts))
    pk = p ** k
    out = []
    for a, c, b in verts:
        mod = p ** (b - k)
        out.append((a - k, _cmap(c, lambda x: (x // pk) % mod), b - k))
    return LatticeClass(p, tuple(out))


def standard_lattice(K, p):
    pl = places(K, p)
    zero = lambda v: 0 if v.kind == "split" else (0, 0)
    return LatticeClass(p, tuple((0, zero(v), 0) for v in pl))


def _local_neighbors(p, F, vertex):
    a, c, b = vertex
    pb, pb1 = p ** b, p ** (b + 1)
    out = [(a + 1, _cmap(c, lambda x: (p * x) % pb), b)]
    for y in F.elements():
        if isinstance(c, tuple):
            out.append((a, ((c[0] + y[0] * pb) % pb1, (c[1] + y[1] * pb) % pb1), b + 1))
        else:
            out.append((a, (c + y * pb) % pb1, b + 1))
    return out


def tp_neighbors(K, lattice):
    """T_p(lattice) as a list of (class, multiplicity), in sorted order.

    The neighbours are the classes of p L + O_K x for x running over
    P^1(L / pL); each local factor moves one step in its tree.
    """
    p = lattice.p
    pl = places(K, p)
    fields = [_residue(K, p, v) for v in pl]
    local = [_local_neighbors(p, F, v) for F, v in zip(fields, lattice.vertices)]
    counts = {}
    for verts in product(*local):
        n = _normalized(p, verts)
        counts[n] = counts.get(n, 0) + 1
    if sum(counts.values()) != p1_size(K, p):
        raise AssertionError("neighbour count differs from |P^1|")
    return sorted(counts.items())


def orbit_growth(K, p, depth):
    """|union of T_p^n L0 for n <= k| for k = 0..depth."""
    start = standard_lattice(K, p)
    seen = {start}
    frontier = [start]
    out = [1]
    for _ in range(depth):
        new = []
        for lat in frontier:
            for n, _ in tp_neighbors(K, lat):
                if n not in seen:
                    seen.add(n)
                    new.append(n)
            if len(seen) > ORBIT_VERTEX_CAP:
                raise ResourceError(f"orbit exceeds {ORBIT_VERTEX_CAP} lattice classes")
        frontier = new
        out.append(len(seen))
    return out


# --- elementary divisors -------------------------------------------------------
class _LocalRing:
    """O_v / p^N: ints for a split place, pairs over (1, w) for an inert one."""

    def __init__(self, K, p, v, N):
        self.K, self.p, self.v, self.N = K, p, v, N
        self.mod = p ** N
        self.split = v.kind == "split"
        if self.split:
            r = v.root
            for _ in range(N.bit_length() + 1):  # Newton lifting of the root of w
                f = r * r - K.t * r + K.n
                r = (r - f * pow(2 * r - K.t, -1, self.mod)) % self.mod
            self.root = r
        self.one = 1 if self.split else (1, 0)
        self.zero = 0 if self.split else (0, 0)

    def from_integral(self, z, unit_den):
        inv = pow(unit_den, -1, self.mod)
        if self.split:
            return (z[0] + z[1] * self.root) * inv % self.mod
        return (z[0] * inv % self.mod, z[1] * inv % self.mod)

    def add(self, x, y):
        if self.split:
            return (x + y) % self.mod
        return ((x[0] + y[0]) % self.mod, (x[1] + y[1]) % self.mod)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def neg(self, x):
        return (-x) % self.mod if self.split else ((-x[0]) % self.mod, (-x[1]) % self.mod)

    def mul(self, x, y):
        if self.split:
            return x * y % self.mod
        z = self.K.mul(x, y)
        return (z[0] % self.mod, z[1] % self.mod)

    def val(self, x):
        v = _val(x, self.p)
        return self.N if v is None or v >= self.N else v

    def shift(self, x, k):
        """x / p^k for x divisible by p^k."""
        q = self.p ** k
        return _cmap(x, lambda c: c // q)

    def pow_p(self, k):
        return self.p ** k % self.mod if self.split else (self.p ** k % self.mod, 0)

    def unit_inv(self, x):
        if self.val(x) != 0:
            raise ArithmeticError("not a unit")
        if self.split:
            return pow(x, -1, self.mod)
        K = self.K
        c = K.conj(x)
        n = pow(K.norm(x) % self.mod, -1, self.mod)
        return (c[0] * n % self.mod, c[1] * n % self.mod)

    def mat_mul(self, a, b):
        return [[self.add(self.mul(a[i][0], b[0][j]), self.mul(a[i][1], b[1][j])) for j in range(2)]
                for i in range(2)]

    def det(self, m):
        return self.sub(self.mul(m[0][0], m[1][1]), self.mul(m[0][1], m[1][0]))

    def mat_inv(self, m):
        di = self.unit_inv(self.det(m))
        return [[self.mul(m[1][1], di), self.mul(self.neg(m[0][1]), di)],
                [self.mul(self.neg(m[1][0]), di), self.mul(m[0][0], di)]]

    def diag(self, x, y):
        return [[x, self.zero], [self.zero, y]]


def _local_cartan(R, m):
    """(k1, (x, y), k2) with m = k1 diag(p^x, p^y) k2 and det k1 = 1."""
    z = R.zero
    if m[0][1] == z and m[1][0] == z:
        x, y = R.val(m[0][0]), R.val(m[1][1])
        if max(x, y) >= R.N:
            raise PrecisionError("matrix is singular to working precision")
        k1 = R.diag(R.one, R.one)
        k2 = R.diag(R.shift(m[0][0], x), R.shift(m[1][1], y))
        return k1, (x, y), k2
    S = [[z, R.one], [R.one, z]]
    P, Q = R.diag(R.one, R.one), R.diag(R.one, R.one)
    A = [row[:] for row in m]
    i, j = min(((i, j) for i in range(2) for j in range(2)), key=lambda ij: R.val(A[ij[0]][ij[1]]))
    if R.val(A[i][j]) >= R.N:
        raise PrecisionError("matrix vanishes to working precision")
    if i:
        A, P = R.mat_mul(S, A), R.mat_mul(S, P)
    if j:
        A, Q = R.mat_mul(A, S), R.mat_mul(Q, S)
    e1 = R.val(A[0][0])
    u = R.shift(A[0][0], e1)
    ui = R.unit_inv(u)
    f = R.mul(R.shift(A[1][0], e1), ui)
    Lm = [[R.one, z], [R.neg(f), R.one]]
    A, P = R.mat_mul(Lm, A), R.mat_mul(Lm, P)
    g = R.mul(R.shift(A[0][1], e1), ui)
    Cm = [[R.one, R.neg(g)], [z, R.one]]
    A, Q = R.mat_mul(A, Cm), R.mat_mul(Q, Cm)
    e2 = R.val(A[1][1])
    if e2 >= R.N:
        raise PrecisionError("matrix is singular to working precision")
    u2 = R.shift(A[1][1], e2)
    # P m Q = diag(p^e1, p^e2) diag(u, u2); list the larger exponent first
    k1 = R.mat_mul(R.mat_inv(P), S)
    k2 = R.mat_mul(S, R.mat_mul(R.diag(u, u2), R.mat_inv(Q)))
    delta = R.det(k1)
    di = R.unit_inv(delta)
    k1 = R.mat_mul(k1, R.diag(di, R.one))
    k2 = R.mat_mul(R.diag(delta, R.one), k2)
    return k1, (e2, e1), k2


@dataclass
class Witness:
    """p^r g = k1 D k2 at every place, with k1 in SL_2, k2 integral of rational
    unit determinant, and D = g0^alpha (w g0 w^-1)^beta h^gamma.

    g0 = diag(p, 1), conjugated by w = ((0, 1), (-1, 0)); h is the split-case
    element (diag(1, p), diag(p, 1)); gamma = 0 when p is inert.
    """

    r: int
    alpha: int
    beta: int
    gamma: int
    k1: list
    k2: list
    scaled: list
    rings: list

    def word(self):
        return [("p", -self.r), ("g0", self.alpha), ("w g0 w^-1", self.beta), ("h", self.gamma)]

    def local_exponents(self):
        a, b, c = self.alpha, self.beta, self.gamma
        if len(self.rings) == 1:
            return [(a, b)]
        return [(a, b + c), (a + c, b)]

    def verify(self):
        dets = []
        for R, k1, k2, m, (x, y) in zip(self.rings, self.k1, self.k2, self.scaled,
                                        self.local_exponents()):
            if min(x, y) < 0:
                return False
            D = R.diag(R.pow_p(x), R.pow_p(y))
            if R.mat_mul(k1, R.mat_mul(D, k2)) != m:
                return False
            if R.det(k1) != R.one or R.val(R.det(k2)) != 0:
                return False
            # det k2 = det(m) / p^(x + y) is only determined mod p^(N - x - y)
            q = R.p ** (R.N - x - y)
            dets.append(_cmap(R.det(k2), lambda c: c % q))
        if len(self.rings) == 1:
            return dets[0][1] == 0
        return dets[0] == dets[1]


@dataclass
class ElementaryDivisors:
    d1: tuple  # exponent of d1 at each place
    d2: tuple
    witness: Witness

    def product_exponent(self):
        """The common valuation of d1 d2 at the places, or None if they differ."""
        s = {a + b for a, b in zip(self.d1, self.d2)}
        return s.pop() if len(s) == 1 else None


def _kdet(K, g):
    return K.sub(K.mul(g[0][0], g[1][1]), K.mul(g[0][1], g[1][0]))


def _vp(q, p):
    q = Fraction(q)
    return _val_int(q.numerator, p) - _val_int(q.denominator, p)


def lattice_elementary_divisors(K, p, g):
    """Local Cartan data of g in GL_2(K) at p, with det g required in Q^*.

    Entries are elements of K (pairs of rationals); they are reduced into
    O_v / p^N with N = 2 V + 4, where V is the valuation of det(p^r g).
    """
    pl = places(K, p)
    g = [[tuple(Fraction(c) for c in e) for e in row] for row in g]
    det = _kdet(K, g)
    if det == (0, 0):
        raise DomainError("matrix is singular")
    if det[1] != 0:
        raise NotInGPrimeError(f"determinant {det} is not in Q_p^*")
    dens = [lcm(e[0].denominator, e[1].denominator) for row in g for e in row]
    r = max(_val_int(dn, p) for dn in dens)
    V = 2 * r + _vp(det[0], p)
    N = 2 * V + 4
    rings = [_LocalRing(K, p, v, N) for v in pl]
    scaled, k1s, k2s, exps = [], [], [], []
    for R in rings:
        m = []
        for row in g:
            out = []
            for e in row:
                dn = lcm(e[0].denominator, e[1].denominator)
                s = _val_int(dn, p)
                unit = dn // p ** s
                z = (int(e[0] * dn) * p ** (r - s), int(e[1] * dn) * p ** (r - s))
                out.append(R.from_integral(z, unit))
            m.append(out)
        k1, xy, k2 = _local_cartan(R, m)
        scaled.append(m)
        k1s.append(k1)
        k2s.append(k2)
        exps.append(xy)
    if len(exps) == 1:
        (x, y), = exps
        alpha, beta, gamma = x, y, 0
    else:
        (x1, y1), (x2, y2) = exps
        if x1 + y1 != x2 + y2:
            raise NotInGPrimeError("determinant valuations differ at the two places")
        alpha, gamma, beta = x1, x2 - x1, y2
    w = Witness(r, alpha, beta, gamma, k1s, k2s, scaled, rings)
    if not w.verify():
        raise AssertionError("Cartan witness does not reconstruct g")
    return ElementaryDivisors(tuple(x for x, _ in exps), tuple(y for _, y in exps), w)


# --- trace form descent and polarization sign -------------------------------------
def _basis_vectors(K):
    """Z-basis (e1, w e1, e2, w e2) of O_K^2 as pairs of K-elements."""
    z, one, w = (0, 0), (1, 0), (0, 1)
    return [(one, z), (w, z), (z, one), (z, w)]


def standard_pairing(K, x, y):
    """psi0(x, y) = x1 y2 - x2 y1 in K."""
    return K.sub(K.mul(x[0], y[1]), K.mul(x[1], y[0]))


def trace_form(K, b):
    """Gram matrix of tr(b psi0) on the Z-basis of O_K^2."""
    B = _basis_vectors(K)
    return [[K.trace(K.mul(b, standard_pairing(K, x, y))) for y in B] for x in B]


def _omega_matrix(K):
    # multiplication by w on (e1, w e1, e2, w e2), rows are images
    t, n = K.t, K.n
    return [[0, 1, 0, 0], [-n, t, 0, 0], [0, 0, 0, 1], [0, 0, -n, t]]


def trace_form_descent(K, psi):
    """The unique b in K with psi(x, y) = tr(b psi0(x, y))."""
    psi = [[Fraction(c) for c in row] for row in psi]
    if any(psi[i][j] != -psi[j][i] for i in range(4) for j in range(4)):
        raise DomainError("form is not alternating")
    M = _omega_matrix(K)
    left = [[sum(M[i][k] * psi[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    right = [[sum(psi[i][k] * M[j][k] for k in range(4)) for j in range(4)] for i in range(4)]
    if left != right:
        raise DomainError("form is not O_K-self-adjoint, so it does not descend")
    # tr(b) = psi(e1, e2), tr(b w) = psi(e1, w e2)
    t, n = K.t, K.n
    u, v = psi[0][2], psi[0][3]
    # tr(b) = 2 b0 + t b1,  tr(b w) = t b0 + (t^2 - 2n) b1
    a11, a12, a21, a22 = 2, t, t, t * t - 2 * n
    dt = a11 * a22 - a12 * a21
    b = ((u * a22 - a12 * v) / dt, (a11 * v - a21 * u) / dt)
    if trace_form(K, b) != psi:
        raise DomainError("form does not descend to a K-bilinear form")
    return b


J = ((0, 1), (-1, 0))


def standard_polarization_check(h, tol=1e-9):
    """Sign of the form x -> x^t J h x for a complex structure h (h^2 = -1)."""
    (a, b), (c, d) = h
    sq = ((a * a + b * c, a * b + b * d), (c * a + d * c, c * b + d * d))
    target = ((-1, 0), (0, -1))
    if any(abs(sq[i][j] - target[i][j]) > tol for i in range(2) for j in range(2)):
        raise InvalidComplexStructureError("h(i)^2 is not -1")
    # J h = ((c, d), (-a, -b)), symmetrized
    s00, s11, s01 = c, -b, (d - a) / 2
    if s00 * s11 - s01 * s01 <= 0:
        raise InvalidComplexStructureError("form is not definite")
    return 1 if s00 > 0 else -1
