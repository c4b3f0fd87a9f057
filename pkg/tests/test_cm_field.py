from itertools import product
from math import gcd, log, pi, sqrt

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmpicard import catalog
from cmpicard.cm_field import class_group_cm, make_cm_field, minkowski_bound, unit_data
from cmpicard.errors import NotCMError, UnsupportedBaseError
from cmpicard.real_quadratic import make_real_quadratic

FIELDS = [(5, (-3, 1)), (2, (-1, 0)), (2, (-5, 0)), (2, (-5, -1)), (5, (-3, 0)), (13, (-1, 0)), (3, (-1, 0)),
          (2, (-3, 0))]


@pytest.fixture(scope="module", params=FIELDS, ids=str)
def field(request):
    return catalog.cm_field(*request.param)


def test_cyclotomic_examples():
    K5 = make_real_quadratic(5)
    L = make_cm_field(K5, catalog.parse_gamma(K5, "(-5+s)/2"))
    assert L.abs_discriminant == 125
    assert class_group_cm(L).order == 1
    assert L.torsion_order == 10
    L = catalog.cm_field(2, (-1, 0))
    assert (L.abs_discriminant, class_group_cm(L).order, L.torsion_order) == (256, 1, 8)


def test_not_cm():
    K = make_real_quadratic(5)
    with pytest.raises(NotCMError):
        make_cm_field(K, catalog.parse_gamma(K, "-1-s"))
    with pytest.raises(NotCMError):
        make_cm_field(K, (3, 0))


def test_unit_search_rejects_non_elements():
    # square-root candidates here settle on non-integer coordinates
    for g in ((-13, 5), (-11, 4)):
        L = catalog.cm_field(13, g)
        assert L.unit_index == 1
        assert L.norm(L.fundamental_unit) == 1


def test_unsupported_base():
    with pytest.raises(UnsupportedBaseError):
        make_cm_field(make_real_quadratic(10), (-1, 0))


def test_minkowski_values():
    # (4/pi)^2 4!/4^4 sqrt|disc|
    for fd in ((5, (-3, 1)), (2, (-1, 0)), (2, (-5, 0))):
        L = catalog.cm_field(*fd)
        want = (4 / pi) ** 2 * 24 / 256 * sqrt(L.abs_discriminant)
        assert float(minkowski_bound(L)) == pytest.approx(want, abs=1e-9)
    assert float(minkowski_bound(catalog.cm_field(5, (-3, 1)))) == pytest.approx(1.6992, abs=1e-4)


def brute_force_class_number(L, bound):
    """Classes met by ideals of norm <= bound, by pairwise equivalence."""
    reps = []
    for A in L.ideals_up_to(bound):
        if not any(L.equivalent(A, B) for B in reps):
            reps.append(A)
    return len(reps)


def test_class_group_against_enumeration(field):
    L = field
    bound = max(int(minkowski_bound(L)) + 1, 12)
    assert brute_force_class_number(L, bound) == class_group_cm(L).order


def test_known_class_number():
    assert class_group_cm(catalog.cm_field(2, (-5, 0))).order == 2


def cyclotomic_roots(L):
    """lcm of 2 and every m with phi(m) | 4 such that Phi_m has a root in L, by a coordinate box search."""
    polys = {3: [1, 1, 1], 4: [1, 0, 1], 5: [1, 1, 1, 1, 1], 8: [1, 0, 0, 0, 1], 12: [1, 0, -1, 0, 1]}
    found = {2}
    box = range(-2, 3)
    for x in product(box, repeat=4):
        for m, f in polys.items():
            acc = (0, 0, 0, 0)
            xp = L.one
            for c in f:
                acc = L.add(acc, L.scale(c, xp))
                xp = L.mul(xp, x)
            if acc == (0, 0, 0, 0):
                found.add(m)
    w = 1
    for m in found:
        w = w * m // gcd(w, m)
    return w * (2 if w % 2 else 1)


def test_torsion_against_cyclotomic_search(field):
    assert field.torsion_order == cyclotomic_roots(field)


def test_unit_data(field):
    L = field
    w, q, reg = unit_data(L)
    assert q in (1, 2)
    K = L.base
    eps = float(K.embed(K.fundamental_unit, 0))
    assert float(reg) == pytest.approx(2 * log(abs(eps)) / q, rel=1e-12)
    # norms from a totally imaginary field are positive, so units have norm 1
    assert L.norm(L.fundamental_unit) == 1


def test_zeta5_unit_index():
    w, q, reg = unit_data(catalog.cm_field(5, (-3, 1)))
    assert (w, q) == (10, 1)
    assert float(reg) == pytest.approx(2 * log((1 + sqrt(5)) / 2))


def test_prime_decomposition(field):
    L = field
    for p in (2, 3, 5, 7, 11, 13):
        primes = L.primes_above(p)
        assert sum(e * f for _, e, f in primes) == 4
        assert all(P.norm == p ** f for P, _, f in primes)
        prod_ideal = L.unit_ideal()
        for P, e, _ in primes:
            prod_ideal = L.ideal_mul(prod_ideal, L.ideal_pow(P, e))
        assert prod_ideal == L.ideal([(p, 0, 0, 0)])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIELDS[:4]), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_norm_is_product_of_embeddings(fd, x):
    L = catalog.cm_field(*fd)
    x = tuple(x)
    if not any(x):
        return
    vals = L.embed(x)
    with mpmath.workdps(40):
        prod = 1
        for v in vals:
            prod *= v
    assert abs(prod - L.norm(x)) < 1e-20 * max(1, abs(L.norm(x)))
    assert L.norm(x) == L.norm_by_det(x)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FIELDS[:4]), st.lists(st.integers(-5, 5), min_size=4, max_size=4),
       st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_ideal_norm_multiplicative(fd, x, y):
    L = catalog.cm_field(*fd)
    x, y = tuple(x), tuple(y)
    if not any(x) or not any(y):
        return
    A, B = L.ideal([x]), L.ideal([y])
    assert A.norm == abs(L.norm(x))
    assert L.ideal_mul(A, B).norm == A.norm * B.norm
    assert L.generator(A) is not None
