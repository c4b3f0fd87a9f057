"""Galois type, CM types and the reflex norm of a quartic CM field.

Embeddings are indexed 0..3 as in EmbeddingSet: phi_1, phi_3 are the complex
conjugates of phi_0, phi_2, and phi_0, phi_1 restrict to the first real
embedding of K.  Galois elements are permutations g of these indices with
g o phi_j = phi_g(j); when L/Q is Galois every automorphism a of L gives
one, via phi_j o a = phi_g(j).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import isqrt

from .errors import DomainError, UnsupportedCaseError
from .forms import form_class_group
from .kernel.groups import (FiniteGroup, GroupRingElement, blackbox_structure,
                            image_order_of_multiplication)
from .kernel.integers import is_prime, primes_up_to
from .kernel.linalg import det, hnf, integer_kernel
from .kernel.polys import RamifiedPrimeError, splits_completely_mod_p
from .orders import pic_mod_base

IDENTITY = (0, 1, 2, 3)
IOTA = (1, 0, 3, 2)
BLOCKS = ({0, 1}, {2, 3})


def compose(g, h):
    """g o h as permutations."""
    return tuple(g[h[j]] for j in range(4))


def inverse(g):
    out = [0] * 4
    for j, k in enumerate(g):
        out[k] = j
    return tuple(out)


def block_permutations():
    """The 8 permutations preserving {{0, 1}, {2, 3}}: a copy of D4."""
    out = []
    for g in permutations(range(4)):
        if all({g[i] for i in b} in BLOCKS for b in BLOCKS):
            out.append(g)
    return sorted(out)


@dataclass(frozen=True)
class Automorphism:
    perm: tuple
    images: tuple  # a(e_i) for i = 0..3

    def __call__(self, x):
        return tuple(sum(Fraction(x[i]) * self.images[i][k] for i in range(4)) for k in range(4))


def _is_ring_map(L, aw, aW):
    K = L.base
    one = L.one

    def push(u):  # u in O_K, mapped through a
        return L.add(L.scale(u[0], one), L.scale(u[1], aw))

    # w^2 = t w - n
    lhs = L.mul(aw, aw)
    rhs = L.sub(L.scale(K.t, aw), L.scale(K.n, one))
    if lhs != rhs:
        return False
    # W^2 = S W - P
    lhs = L.mul(aW, aW)
    rhs = L.sub(L.mul(push(L.S), aW), push(L.P))
    return lhs == rhs


def automorphisms(L):
    """All automorphisms of L, found numerically and verified exactly."""
    if hasattr(L, "_automorphisms"):
        return L._automorphisms
    vals = L.embeddings.values
    out = []
    for g in block_permutations():
        # a non-automorphism gives irrational coordinates; the exact check below
        # guards against a coincidental near-integer passing the threshold
        aw = L.recover([vals[g[j]][1] for j in range(4)], reject=1e-9)
        aW = L.recover([vals[g[j]][2] for j in range(4)], reject=1e-9)
        if aw is None or aW is None or not _is_ring_map(L, aw, aW):
            continue
        images = (L.one, aw, aW, L.mul(aw, aW))
        out.append(Automorphism(g, images))
    if IDENTITY not in [a.perm for a in out] or IOTA not in [a.perm for a in out]:
        raise AssertionError("automorphism search missed the identity or conjugation")
    L._automorphisms = out
    return out


def _norm_type(L):
    """Galois type read off from N_{K/Q}(gamma)."""
    K = L.base
    n = K.norm(L.gamma)
    if n > 0 and isqrt(n) ** 2 == n:
        return "V4"
    if n % K.d == 0 and n > 0 and isqrt(n // K.d) ** 2 == n // K.d:
        return "C4"
    return "D4"


def galois_type(L):
    auts = automorphisms(L)
    if len(auts) == 2:
        kind = "D4"
    elif len(auts) == 4:
        kind = "C4" if any(compose(a.perm, a.perm) != IDENTITY for a in auts) else "V4"
    else:
        raise AssertionError(f"unexpected automorphism count {len(auts)}")
    if kind != _norm_type(L):
        raise AssertionError(f"Galois type {kind} disagrees with the norm test")
    return kind


def cm_types(L=None):
    """The 4 CM types, one embedding per conjugate pair, in lexicographic order."""
    return [(a, b) for a in (0, 1) for b in (2, 3)]


def act_on_type(g, phi):
    return tuple(sorted(g[j] for j in phi))


@dataclass
class ReflexData:
    galois_type: str
    embeddings: object
    phi: tuple
    phi0: int
    group: FiniteGroup = field(repr=False)
    sigma_set: list
    reflex_element: GroupRingElement = field(repr=False)
    sigma: tuple
    tau: tuple = None
    relabel: dict = field(default_factory=dict)
    automorphisms: dict = field(default_factory=dict, repr=False)
    fixed_field: str = None


def reflex_data(L, phi=(0, 2), phi0=None):
    phi = tuple(sorted(phi))
    if phi not in cm_types(L):
        raise DomainError(f"{phi} is not a CM type")
    phi0 = phi[0] if phi0 is None else phi0
    if phi0 not in phi:
        raise DomainError("phi0 must lie in the CM type")
    kind = galois_type(L)
    auts = {a.perm: a for a in automorphisms(L)}
    elems = list(auts) if kind != "D4" else block_permutations()
    G = FiniteGroup(elems, compose)
    sigma_set = [g for g in elems if g[phi0] in phi]
    r = GroupRingElement.from_elements(G, [inverse(g) for g in sigma_set])
    other = next(j for j in phi if j != phi0)
    e = GroupRingElement.basis
    if kind == "D4":
        tau = next(g for g in elems if g != IDENTITY and g[phi0] == phi0)
        sigma = next(g for g in elems if G.order_of(g) == 4 and g[phi0] == other)
        t = e(G, IDENTITY) + e(G, tau) + e(G, G.power(sigma, 3)) + e(G, compose(sigma, tau))
        if r != t:
            raise AssertionError("reflex element differs from 1 + tau + sigma^3 + sigma tau")
        relabel = {"sigma": sigma, "tau": tau}
        fixed = None
    else:
        tau = None
        sigma = next(g for g in sigma_set if g != IDENTITY)
        expected = e(G, IDENTITY) + e(G, inverse(sigma))
        if r != expected:
            raise AssertionError("reflex element differs from 1 + sigma^-1")
        if (kind == "C4") != (G.order_of(sigma) == 4):
            raise AssertionError("sigma has the wrong order for the Galois type")
        relabel = {"sigma": sigma}
        fixed = "fixed field of sigma" if kind == "V4" else None
    return ReflexData(kind, L.embeddings, phi, phi0, G, sigma_set, r, sigma, tau,
                      relabel, auts, fixed)


def reflex_norm_element(rd):
    return rd.reflex_element


def c4_identity_holds(rd):
    """(1 + s^-1)(1 - s^-1) + (1 + s^2) * 1 == 2 in Z[G]."""
    G = rd.group
    s = rd.sigma
    one = GroupRingElement.basis(G, IDENTITY)
    si = GroupRingElement.basis(G, inverse(s))
    s2 = GroupRingElement.basis(G, G.power(s, 2))
    return (one + si) * (one - si) + (one + s2) * one == 2


def galois_over_base(rd):
    """Elements of the group fixing K: those preserving each block."""
    return [g for g in rd.group.elements if g[0] in (0, 1)]


def d4_identity_holds(rd):
    """t (1 + tau) == 2 (1 + tau) + sigma * sum of Gal(M/K)."""
    G = rd.group
    e = GroupRingElement.basis
    one = e(G, IDENTITY)
    tau = e(G, rd.tau)
    norm = GroupRingElement.from_elements(G, galois_over_base(rd))
    lhs = rd.reflex_element * (one + tau)
    rhs = (one + tau) * 2 + e(G, rd.sigma) * norm
    return lhs == rhs


# --- orbit lower bounds ------------------------------------------------------
@dataclass
class FixedSubring:
    basis: list  # Z-basis of R' in L coordinates
    discriminant: int
    picard: object


def fixed_subring(R, rd):
    """R' = R cap K_x for the field K_x fixed by sigma (V4 case)."""
    if rd.galois_type != "V4":
        raise UnsupportedCaseError("the fixed subring of sigma is used only in the V4 case")
    L = R.field
    a = rd.automorphisms[rd.sigma]
    basis = R.z_basis()
    diff = [[int(c) for c in L.sub(a(b), b)] for b in basis]
    coeffs = integer_kernel(diff)
    if len(coeffs) != 2:
        raise AssertionError(f"fixed field of sigma {rd.sigma} is not quadratic")
    sub = [tuple(sum(c[k] * basis[k][i] for k in range(4)) for i in range(4)) for c in coeffs]
    gram = [[Fraction(L.trace(L.mul(x, y)), 2) for y in sub] for x in sub]
    D = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
    if D.denominator != 1 or D >= 0 or D % 4 not in (0, 1):
        raise AssertionError(f"fixed field of sigma {rd.sigma} gave discriminant {D}")
    D = int(D)
    return FixedSubring(sub, D, form_class_group(D).presentation)


def orbit_lower_bound(R, rd):
    if rd.galois_type == "V4":
        return image_order_of_multiplication(fixed_subring(R, rd).picard, 4)
    return image_order_of_multiplication(pic_mod_base(R), 2)


def v4_discriminant_bound(R, rd):
    """(disc R', disc(O_K tensor R')), checking O_K R' lies in R."""
    if rd.galois_type != "V4":
        raise UnsupportedCaseError("discriminant comparison needs the V4 case")
    L = R.field
    sub = fixed_subring(R, rd)
    prods = [L.mul(L.from_base(u), x) for u in ((1, 0), (0, 1)) for x in sub.basis]
    if not all(R.contains(x) for x in prods):
        raise AssertionError("O_K R' is not contained in R")
    gram = [[L.trace(L.mul(x, y)) for y in prods] for x in prods]
    tensor = det(gram)
    K = L.base
    if tensor != sub.discriminant ** 2 * K.discriminant ** 2:
        raise AssertionError("O_K and R' are not linearly disjoint")
    if tensor % R.discriminant:
        raise AssertionError("disc(R) does not divide disc(O_K R')")
    return sub.discriminant, tensor


def v4_inequality_holds(R, rd):
    """|disc R'| >= |disc O_K|^-1 |disc R|^(1/2), compared after squaring."""
    dr, _ = v4_discriminant_bound(R, rd)
    K = R.field.base
    return dr * dr * K.discriminant ** 2 >= abs(R.discriminant)


# --- split primes and the reflex norm on ideals --------------------------------
def split_in_order(R, p):
    """p is coprime to N(f) disc(O_L) and splits completely in L."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    L = R.field
    if (R.index * L.abs_discriminant) % p == 0:
        return False
    primes = L.primes_above(p)
    split = len(primes) == 4 and all(P.norm == p for P, _, _ in primes)
    try:
        poly = splits_completely_mod_p(L.absolute_min_poly, p)
    except RamifiedPrimeError:
        return split  # p divides the index of Z[theta]
    if poly != split:
        raise AssertionError(f"splitting of {p} disagrees between test routes")
    return split


def smallest_split_prime(R, limit=10 ** 6):
    for p in primes_up_to(limit):
        if split_in_order(R, int(p)):
            return int(p)
    raise DomainError(f"no totally split prime below {limit}")


def apply_to_ideal(L, a, A):
    rows = [[int(c) for c in a(r)] for r in A.basis]
    return L.ideal([tuple(r) for r in hnf(rows)])


def reflex_norm_ideal(rd, q, L):
    """prod over g in Sigma of g^-1(q) for a degree-one prime q."""
    if rd.galois_type == "D4":
        raise UnsupportedCaseError("reflex norms of D4 fields live in the degree-8 closure")
    p = q.norm
    if not is_prime(p):
        raise DomainError("q must be a prime of degree one")
    if L.abs_discriminant % p == 0 or not all(P.norm == p for P, _, _ in L.primes_above(p)):
        raise DomainError(f"{p} does not split completely in L")
    out = L.unit_ideal()
    for g in rd.sigma_set:
        out = L.ideal_mul(out, apply_to_ideal(L, rd.automorphisms[inverse(g)], q))
    return out


def relative_norm_ideal(L, A):
    """N_{L/K}(A) as a K-ideal."""
    return L.base_part(L.ideal_mul(A, L.ideal_conj(A)))


@dataclass
class ReflexImage:
    presentation: object
    order: int
    bound: int
    stabilized: bool
    generators: list


def _subgroup(pres, gens):
    zero = tuple(0 for _ in pres.elementary_divisors)
    bb = blackbox_structure(list(gens), pres.add, zero)
    return bb.presentation


def reflex_image_oracle(R, rd, bound, max_doublings=6):
    """Subgroup of Pic(R) generated by reflex norms of split degree-one primes.

    bound is doubled until the subgroup is unchanged across two doublings.
    """
    if rd.galois_type == "D4":
        raise UnsupportedCaseError("reflex norms of D4 fields live in the degree-8 closure")
    L = R.field
    pic = R.picard_data
    pres = pic.presentation
    gens = []
    checked = set()
    used = []

    def extend(B):
        for p in primes_up_to(B):
            p = int(p)
            if p in checked:
                continue
            checked.add(p)
            if not split_in_order(R, p):
                continue
            used.append(p)
            for q, _, _ in L.primes_above(p):
                c = pic.coordinate(reflex_norm_ideal(rd, q, L))
                if c not in gens:
                    gens.append(c)

    extend(bound)
    if not used:
        raise DomainError(f"no totally split prime coprime to the conductor below {bound}")
    history = [_subgroup(pres, gens).order]
    B = bound
    stable = False
    for _ in range(max_doublings):
        B *= 2
        extend(B)
        history.append(_subgroup(pres, gens).order)
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            stable = True
            break
    sub = _subgroup(pres, gens)
    return ReflexImage(sub, sub.order, B, stable, list(gens))


def disc_galois_closure_bound(R, rd=None):
    """(|disc O_M|, |disc R|^4, whether the first is at most the second) with M = L."""
    kind = rd.galois_type if rd else galois_type(R.field)
    if kind == "D4":
        raise UnsupportedCaseError("the Galois closure of a D4 field is not constructed")
    a = abs(R.field.abs_discriminant)
    b = abs(R.discriminant) ** 4
    return a, b, a <= b
