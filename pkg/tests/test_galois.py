import pytest

from cmpicard import catalog
from cmpicard.errors import DomainError, UnsupportedCaseError
from cmpicard.galois import (IDENTITY, automorphisms, block_permutations, c4_identity_holds, cm_types, compose,
                             d4_identity_holds, disc_galois_closure_bound, fixed_subring, galois_type,
                             orbit_lower_bound, reflex_data, reflex_image_oracle, reflex_norm_ideal,
                             relative_norm_ideal, smallest_split_prime, split_in_order, v4_discriminant_bound,
                             v4_inequality_holds)
from cmpicard.kernel.groups import blackbox_structure
from cmpicard.kernel.integers import primes_up_to
from cmpicard.orders import make_order, pic_mod_base, picard_structure
from test_real_quadratic import brute_force_reduced

TYPES = {(5, (-3, 1)): "C4", (2, (-1, 0)): "V4", (2, (-5, 0)): "V4", (2, (-5, -1)): "D4", (5, (-3, 0)): "V4",
         (13, (-1, 0)): "V4", (3, (-1, 0)): "V4", (2, (-3, -1)): "D4", (13, (-5, 1)): "D4",
         (13, (-5, -3)): "C4", (13, (-13, 5)): "D4"}

ORDERS = [((5, (-3, 1)), 5), ((5, (-3, 1)), 4), ((2, (-1, 0)), 3), ((2, (-5, 0)), 3), ((5, (-3, 0)), 4),
          ((2, (-5, -1)), 3), ((2, (-5, -1)), 2)]


def splitting_type(L, limit=300):
    """Galois type seen from residue degrees of unramified primes up to limit."""
    patterns = set()
    for p in primes_up_to(limit):
        p = int(p)
        if L.abs_discriminant % p == 0:
            continue
        patterns.add(tuple(sorted(f for _, _, f in L.primes_above(p))))
    if any(len(set(pat)) > 1 for pat in patterns):
        return "D4"
    return "C4" if (4,) in patterns else "V4"


@pytest.mark.parametrize("fd", sorted(TYPES), ids=str)
def test_galois_type(fd):
    L = catalog.cm_field(*fd)
    assert galois_type(L) == TYPES[fd] == splitting_type(L)
    assert len(automorphisms(L)) == (2 if TYPES[fd] == "D4" else 4)


@pytest.mark.parametrize("fd", sorted(TYPES)[:5], ids=str)
def test_automorphisms_are_ring_maps(fd):
    L = catalog.cm_field(*fd)
    xs = [(1, 2, 0, -1), (0, -1, 3, 2), (2, 0, -1, 1)]
    for a in automorphisms(L):
        for x in xs:
            for y in xs:
                assert a(L.mul(x, y)) == L.mul(a(x), a(y))
            assert L.norm(a(x)) == L.norm(x)


def test_cm_types():
    assert cm_types() == [(0, 2), (0, 3), (1, 2), (1, 3)]
    assert len(block_permutations()) == 8
    L = catalog.cm_field(5, (-3, 1))
    with pytest.raises(DomainError):
        reflex_data(L, (0, 1))


def test_group_ring_identities():
    for fd in ((5, (-3, 1)), (13, (-5, -3))):
        for phi in cm_types():
            assert c4_identity_holds(reflex_data(catalog.cm_field(*fd), phi))
    for fd in ((2, (-5, -1)), (2, (-3, -1))):
        for phi in cm_types():
            rd = reflex_data(catalog.cm_field(*fd), phi)
            assert d4_identity_holds(rd)
            assert compose(rd.tau, rd.tau) == IDENTITY


def test_c4_sigma_has_order_four():
    rd = reflex_data(catalog.cm_field(5, (-3, 1)))
    assert rd.group.order_of(rd.sigma) == 4
    rd = reflex_data(catalog.cm_field(2, (-1, 0)))
    assert rd.group.order_of(rd.sigma) == 2


def image_by_enumeration(pres, m):
    return len({pres.scale(x, m) for x in pres.elements()})


@pytest.mark.parametrize("fd,f", ORDERS, ids=str)
def test_orbit_lower_bound(fd, f):
    L = catalog.cm_field(*fd)
    R = make_order(L, f)
    for phi in cm_types():
        rd = reflex_data(L, phi)
        if rd.galois_type == "V4":
            sub = fixed_subring(R, rd)
            assert sub.picard.order == len(brute_force_reduced(sub.discriminant))
            want = image_by_enumeration(sub.picard, 4)
        else:
            want = image_by_enumeration(pic_mod_base(R), 2)
        assert orbit_lower_bound(R, rd) == want


def test_orbit_bound_examples():
    L = catalog.cm_field(5, (-3, 1))
    assert orbit_lower_bound(make_order(L, 5), reflex_data(L)) == 5
    L = catalog.cm_field(2, (-5, -1))
    assert orbit_lower_bound(make_order(L, 3), reflex_data(L)) == 5


def test_v4_discriminants():
    L = catalog.cm_field(2, (-1, 0))
    R = make_order(L, 1)
    assert v4_discriminant_bound(R, reflex_data(L, (0, 2))) == (-4, 1024)
    assert v4_discriminant_bound(R, reflex_data(L, (0, 3))) == (-8, 4096)
    for fd, f in ORDERS:
        L = catalog.cm_field(*fd)
        R = make_order(L, f)
        for phi in cm_types():
            rd = reflex_data(L, phi)
            if rd.galois_type == "V4":
                assert v4_inequality_holds(R, rd)
    with pytest.raises(UnsupportedCaseError):
        v4_discriminant_bound(make_order(catalog.cm_field(5, (-3, 1)), 1), reflex_data(catalog.cm_field(5, (-3, 1))))


def test_split_in_order():
    R = make_order(catalog.cm_field(5, (-3, 1)), 1)
    assert split_in_order(R, 11)
    assert not split_in_order(R, 2)
    assert not split_in_order(R, 7)
    assert not split_in_order(R, 5)
    assert [int(p) for p in primes_up_to(60) if split_in_order(R, int(p))] == [11, 31, 41]
    with pytest.raises(DomainError):
        split_in_order(R, 4)
    assert not split_in_order(make_order(R.field, 11), 11)
    assert smallest_split_prime(make_order(catalog.cm_field(2, (-1, 0)), 1)) == 17


def test_reflex_norm_of_a_split_prime():
    L = catalog.cm_field(5, (-3, 1))
    rd = reflex_data(L)
    for q, _, _ in L.primes_above(11):
        A = reflex_norm_ideal(rd, q, L)
        assert A.norm == 121
        # for C4 the reflex norm times its conjugate is the full orbit of q
        assert L.ideal_mul(A, L.ideal_conj(A)) == L.ideal([(11, 0, 0, 0)])
        assert relative_norm_ideal(L, A) == L.base.principal_ideal((11, 0))
        factors = [P for P, _, _ in L.primes_above(11) if P.contains_ideal(A)]
        assert len(factors) == 2
        assert relative_norm_ideal(L, factors[0]) != relative_norm_ideal(L, factors[1])
    with pytest.raises(DomainError):
        reflex_norm_ideal(rd, L.primes_above(2)[0][0], L)
    with pytest.raises(UnsupportedCaseError):
        D = catalog.cm_field(2, (-5, -1))
        reflex_norm_ideal(reflex_data(D), D.primes_above(7)[0][0], D)


def subgroup_order(pres, gens):
    zero = tuple(0 for _ in pres.elementary_divisors)
    return blackbox_structure(list(gens), pres.add, zero).presentation.order


@pytest.mark.parametrize("fd,f", [o for o in ORDERS if o[0] != (2, (-5, -1))], ids=str)
def test_reflex_image(fd, f):
    L = catalog.cm_field(*fd)
    R = make_order(L, f)
    pres = picard_structure(R)
    for phi in cm_types():
        rd = reflex_data(L, phi)
        small = reflex_image_oracle(R, rd, 30, max_doublings=0)
        big = reflex_image_oracle(R, rd, 30)
        assert big.stabilized
        assert pres.order % big.order == 0
        assert big.order >= orbit_lower_bound(R, rd)
        # enlarging the prime bound only adds generators
        assert subgroup_order(pres, small.generators + big.generators) == big.order
        assert big.order % small.order == 0


def test_known_reflex_images():
    L = catalog.cm_field(2, (-5, 0))
    R = make_order(L, 3)
    assert [reflex_image_oracle(R, reflex_data(L, phi), 50).order for phi in cm_types()] == [2, 4, 4, 2]


def test_disc_galois_closure_bound():
    L = catalog.cm_field(5, (-3, 1))
    assert disc_galois_closure_bound(make_order(L, 1)) == (125, 125 ** 4, True)
    assert disc_galois_closure_bound(make_order(L, 2)) == (125, 2000 ** 4, True)
    with pytest.raises(UnsupportedCaseError):
        disc_galois_closure_bound(make_order(catalog.cm_field(2, (-5, -1)), 1))
