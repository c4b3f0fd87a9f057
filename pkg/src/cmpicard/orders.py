"""Orders R_f = O_K + f O_L in a quartic CM field and their Picard groups."""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import log2

import mpmath

from .errors import DomainError
from .kernel.groups import LabelledElement, ResourceError, blackbox_structure, quotient_by_subgroup
from .kernel.integers import factor_integer, omega, primes_up_to
from .kernel.linalg import det, reduce_mod_hnf
from .real_quadratic import KIdeal


@dataclass(eq=False)
class OrderData:
    field: object
    conductor: KIdeal
    generator: tuple  # g with f = g O_K
    index: int  # |O_L / R| = N(f)
    discriminant: int
    residue_quotient_data: tuple = None  # (|(O_L/f)^*|, |(R/f O_L)^*|)

    def __post_init__(self):
        L = self.field
        K = L.base
        g = self.generator
        self.g_ideal_L = L.ideal([L.from_base(g)])
        self.mod_rows = [list(r) for r in self.g_ideal_L.basis]
        self.conductor_primes = [P for P, _ in L.factor_ideal(self.g_ideal_L)]
        self.base_conductor_primes = []
        for p, _ in factor_integer(self.index) if self.index > 1 else []:
            for kp, _, _ in K.primes_above(p):
                if kp.contains(g):
                    self.base_conductor_primes.append(kp)
        self.residue_quotient_data = (self._units_mod_f_L(), self._units_mod_f_K())

    # membership and residues
    def contains(self, x):
        """x in R, i.e. the W-part of x lies in f."""
        if any(Fraction(c).denominator != 1 for c in x):
            return False
        return self.conductor.contains((x[2], x[3]))

    def reduce(self, x):
        """Canonical representative of x modulo f O_L."""
        return tuple(reduce_mod_hnf([int(c) for c in x], self.mod_rows))

    def mul_mod(self, x, y):
        return self.reduce(self.field.mul(x, y))

    def is_unit_mod_f(self, x):
        return not any(P.contains(x) for P in self.conductor_primes)

    @property
    def is_maximal(self):
        return self.index == 1

    def z_basis(self):
        L = self.field
        K = L.base
        g = self.generator
        gw = K.mul(g, (0, 1))
        return [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, g[0], g[1]), (0, 0, gw[0], gw[1])]

    def residue_elements_L(self):
        """Representatives of O_L / f O_L."""
        diag = [self.mod_rows[i][i] for i in range(4)]
        out = [()]
        for d in diag:
            out = [v + (a,) for v in out for a in range(d)]
        return [self.reduce(v) for v in out]

    def _units_mod_f_L(self):
        n = self.g_ideal_L.norm
        val = Fraction(n)
        for P in self.conductor_primes:
            val *= 1 - Fraction(1, P.norm)
        return int(val)

    def _units_mod_f_K(self):
        val = Fraction(self.index)
        for kp in self.base_conductor_primes:
            val *= 1 - Fraction(1, kp.norm)
        return int(val)

    def count_units_by_enumeration(self):
        """(|(O_L/f)^*|, |(O_K/f)^*|) by listing residues (small conductors only)."""
        units_L = sum(1 for x in self.residue_elements_L() if self.is_unit_mod_f(x))
        (a, b), (_, c) = self.conductor.basis
        units_K = 0
        for x0 in range(a):
            for x1 in range(c):
                if not any(kp.contains((x0, x1)) for kp in self.base_conductor_primes):
                    units_K += 1
        return units_L, units_K

    # units of R
    @cached_property
    def unit_index_data(self):
        """(a0, b0, i0): R^* = <zeta^a0> x <zeta^i0 eps^b0>, index a0 * b0."""
        L = self.field
        zeta = L.torsion_generator
        w = L.torsion_order
        a0 = next(a for a in range(1, w + 1) if self.contains(L.power(zeta, a)))
        eps = L.fundamental_unit
        zpows = [L.power(zeta, i) for i in range(w)]
        e = L.one
        bound = self.residue_quotient_data[0] + 1
        for b in range(1, bound + 1):
            e = self.mul_mod(e, eps)
            for i, z in enumerate(zpows):
                if self.contains(L.mul(z, e)):
                    return a0, b, i
        raise AssertionError("no power of the fundamental unit lies in R")

    @property
    def unit_index(self):
        a0, b0, _ = self.unit_index_data
        return a0 * b0

    @property
    def torsion_order(self):
        return self.field.torsion_order // self.unit_index_data[0]

    @property
    def regulator(self):
        return self.unit_index_data[1] * self.field.regulator

    def unit_coset_reps(self):
        """Representatives of O_L^* / R^*."""
        L = self.field
        a0, b0, _ = self.unit_index_data
        zeta, eps = L.torsion_generator, L.fundamental_unit
        return [L.mul(L.power(zeta, i), L.power(eps, j)) for i in range(a0) for j in range(b0)]

    @cached_property
    def picard_order(self):
        return picard_order_exact_sequence(self)

    @cached_property
    def picard_data(self):
        return PicardGroup(self)

    @property
    def picard_structure(self):
        return self.picard_data.presentation


def _conductor_generator(K, f):
    if isinstance(f, KIdeal):
        return K.generator(f), f
    if isinstance(f, int):
        f = (f, 0)
    f = (int(f[0]), int(f[1]))
    if f == (0, 0):
        raise DomainError("conductor must be a nonzero ideal")
    I = K.principal_ideal(f)
    return f, I


def make_order(L, f):
    """R_f for a nonzero O_K-ideal f (given as KIdeal, element or integer)."""
    K = L.base
    if isinstance(f, KIdeal) and f.norm == 0:
        raise DomainError("conductor must be a nonzero ideal")
    g, I = _conductor_generator(K, f)
    n = I.norm
    R = OrderData(L, I, g, n, 0)
    basis = R.z_basis()
    gram = [[L.trace(L.mul(a, b)) for b in basis] for a in basis]
    R.discriminant = det(gram)
    if R.discriminant != n * n * L.abs_discriminant:
        raise AssertionError("order discriminant law fails")
    return R


def picard_order_exact_sequence(R):
    L = R.field
    units_L, units_K = R.residue_quotient_data
    num = L.class_group.order * units_L
    den = units_K * R.unit_index
    if num % den:
        raise AssertionError(f"exact sequence division not exact: {num}/{den}")
    return num // den


class PicardGroup:
    """Pic(R) through the invariants (class in Pic(O_L), coset in Q).

    For A coprime to f in O_L-class c, A * iota(B_c) = (alpha) where B_c is a
    fixed representative coprime to f; the coset of alpha in
    Q = (O_L/f)^* / ((O_K/f)^* . image of O_L^*) completes the invariant.
    """

    def __init__(self, R, max_generators=64):
        self.R = R
        L = R.field
        self.cl = L.class_group_data
        self.cl_pres = self.cl.presentation
        self._reps = {}
        self._carry = {}
        self.H = self._subgroup_H()
        self._basic = self._coprime_class_reps()
        ident = (tuple(0 for _ in self.cl_pres.elementary_divisors), self.coset(L.one))
        target = R.picard_order
        self.bb = blackbox_structure(self._candidates(), self.mul, ident,
                                     target_order=target, max_generators=max_generators)
        self.presentation = self.bb.presentation

    def _subgroup_H(self):
        R = self.R
        L = R.field
        gens = []
        (a, _), (_, c) = R.conductor.basis
        for x0 in range(a):
            for x1 in range(c):
                x = (x0, x1, 0, 0)
                if R.is_unit_mod_f(x):
                    gens.append(R.reduce(x))
        H = set(gens)
        for u in (L.torsion_generator, L.fundamental_unit):
            u = R.reduce(u)
            frontier = list(H)
            while frontier:
                new = []
                for h in frontier:
                    y = R.mul_mod(h, u)
                    if y not in H:
                        H.add(y)
                        new.append(y)
                frontier = new
        return H

    def coset(self, x):
        R = self.R
        x = R.reduce(x)
        return min(R.mul_mod(x, h) for h in self.H)

    def _coprime_class_reps(self):
        """For each SNF generator of Pic(O_L), a prime ideal coprime to f in its class."""
        L = self.R.field
        ds = self.cl_pres.elementary_divisors
        if not ds:
            return []
        want = {}
        for P in self._coprime_primes():
            v = self.cl.coordinate(P)
            for j in range(len(ds)):
                unit = tuple(1 if k == j else 0 for k in range(len(ds)))
                if v == unit and j not in want:
                    want[j] = P
            if len(want) == len(ds):
                return [want[j] for j in range(len(ds))]
        raise ResourceError("no coprime prime found in a generator class")

    def _coprime_primes(self, limit=10 ** 6):
        R = self.R
        L = R.field
        lo, hi = 2, 64
        while lo <= limit:
            for p in primes_up_to(hi):
                if p < lo:
                    continue
                for P, _, _ in L.primes_above(int(p)):
                    if P not in R.conductor_primes:
                        yield P
            lo, hi = hi + 1, 2 * hi

    def class_rep(self, c):
        """B_c = product of the fixed generator representatives."""
        if c not in self._reps:
            L = self.R.field
            I = L.unit_ideal()
            for P, k in zip(self._basic, c):
                I = L.ideal_mul(I, L.ideal_pow(P, k))
            self._reps[c] = I
        return self._reps[c]

    def invariant(self, A):
        L = self.R.field
        c = self.cl.coordinate(A) if self.cl_pres.rank else ()
        B = self.class_rep(c)
        alpha = L.generator(L.ideal_mul(A, L.ideal_conj(B)))
        if alpha is None:
            raise AssertionError("class representative mismatch")
        return (c, self.coset(alpha))

    def _beta(self, c1, c2):
        key = (c1, c2)
        if key not in self._carry:
            L = self.R.field
            c3 = self.cl_pres.add(c1, c2)
            I = L.ideal_mul(L.ideal_mul(self.class_rep(c1), self.class_rep(c2)),
                            L.ideal_conj(self.class_rep(c3)))
            beta = L.generator(I)
            if beta is None:
                raise AssertionError("carry ideal not principal")
            self._carry[key] = beta
        return self._carry[key]

    def mul(self, x, y):
        (c1, a1), (c2, a2) = x, y
        R = self.R
        L = R.field
        if not c1:
            return ((), self.coset(L.mul(a1, a2)))
        beta = self._beta(c1, c2)
        return (self.cl_pres.add(c1, c2), self.coset(L.mul(L.mul(a1, a2), beta)))

    def _candidates(self):
        for P in self._coprime_primes():
            yield LabelledElement(self.invariant(P), P)

    def coordinate(self, A):
        """Coordinates in the presentation of the class of A cap R (A coprime to f)."""
        inv = self.invariant(A)
        if inv not in self.bb.elements:
            raise AssertionError("invariant outside the enumerated group")
        return self.bb.coordinate(inv)


def picard_structure(R):
    return R.picard_structure


def pic_mod_base(R):
    """Pic(R) modulo the classes of a R for O_K-ideals a."""
    K = R.field.base
    if K.class_number != 1:
        raise DomainError("base fields with nontrivial class group are out of scope")
    # Pic(O_K) is trivial, so the image subgroup has no generators
    return quotient_by_subgroup(R.picard_structure, [])


def two_torsion_dimension(R):
    return R.picard_structure.two_rank()


def two_torsion_report(R):
    d = abs(R.discriminant)
    return {"two_rank": two_torsion_dimension(R), "omega_disc": omega(d), "log2_disc": log2(d)}


def r_principal(R, I):
    """Whether the O_L-ideal I (coprime to f) becomes principal in Pic(R)."""
    L = R.field
    alpha = L.generator(I)
    if alpha is None:
        return False
    return any(R.contains(L.mul(alpha, u)) for u in R.unit_coset_reps())


def picard_bruteforce_oracle(R, norm_bound):
    """Number of Pic(R)-classes among ideals A cap R, A coprime to f, N(A) <= bound.

    A and B are identified when A iota(B) has a generator lying in R up to a
    unit.  Ideals are first sorted into O_L-classes against a leader C; with
    A iota(C) = (a), B iota(C) = (b) and C iota(C) = (c), the ideal A iota(B)
    is generated by a iota(b) / c.  Writing 1/c = c'/n with n = N(c) keeps
    everything integral.
    """
    L = R.field
    K = L.base
    cosets = R.unit_coset_reps()
    ideals = [A for A in L.ideals_up_to(norm_bound) if _coprime(R, A)]
    buckets = []  # (iota(C), n, c', [iota(b) c' for the class representatives b])
    count = 0
    for A in ideals:
        for conj_c, n, c_adj, reps in buckets:
            a = L.generator(L.ideal_mul(A, conj_c))
            if a is not None:
                break
        else:
            c = L.base_generator_of_rel_norm(A)
            n = abs(K.norm(c))
            # c * c_adj = n
            c_adj = L.from_base(tuple(K.norm(c) // n * x for x in K.conj(c)))
            conj_c, reps = L.ideal_conj(A), []
            buckets.append((conj_c, n, c_adj, reps))
            a = L.from_base(c)
        au = [L.mul(a, u) for u in cosets]
        for w in reps:
            if any(_divided_in_order(R, L.mul(x, w), n) for x in au):
                break
        else:
            reps.append(L.mul(L.iota(a), c_adj))
            count += 1
    return count


def _divided_in_order(R, x, n):
    if any(c % n for c in x):
        return False
    return R.contains(tuple(c // n for c in x))


def _coprime(R, A):
    return not any(P.contains_ideal(A) for P in R.conductor_primes)


def oracle_bound(R):
    from .cm_field import minkowski_bound
    return int(minkowski_bound(R.field) * R.index ** 2) + 1


def residue_unit_lower_bound(n, degree):
    """(Euler-product form, 5 log form) of the lower bound for |(O_L/f)^*| / |(R/f)^*|."""
    if n < 2:
        raise DomainError("n must be at least 2")
    euler = Fraction(n)
    for p, _ in factor_integer(n):
        euler *= (1 - Fraction(1, p)) ** degree
    with mpmath.workprec(128):
        logform = mpmath.mpf(n) / (5 * mpmath.log(n)) ** degree
    return euler, logform
