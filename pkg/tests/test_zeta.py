from fractions import Fraction
from math import gcd, sqrt

import mpmath
import pytest

from cmpicard import catalog
from cmpicard.errors import DomainError
from cmpicard.orders import make_order
from cmpicard.zeta import (convert_regulator, local_ratio_by_counts, local_ratio_by_euler_factors,
                           regulator_prime, residue_estimate, residue_formula_rhs, residue_ratio_local,
                           residue_report)


def l_at_one(chi, k):
    """L(1, chi) = -(1/k) sum chi(a) psi(a/k) for a non-principal character mod k."""
    return -sum(chi(a) * mpmath.digamma(mpmath.mpf(a) / k) for a in range(1, k + 1)) / k


def kronecker(D):
    """The quadratic character of discriminant D on positive integers."""
    def chi(a):
        if gcd(D, a) != 1:
            return 0
        s = 1
        while a % 2 == 0:
            a //= 2
            s *= 1 if D % 8 in (1, 7) else -1
        return s * jacobi(D % a, a)
    return chi


def jacobi(n, m):
    s = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                s = -s
        n, m = m, n
        if n % 4 == 3 and m % 4 == 3:
            s = -s
        n %= m
    return s if m == 1 else 0


def cyclic_characters(k, g, order):
    """The non-trivial powers of the character mod k sending the generator g to exp(2 pi i / order)."""
    log = {}
    x = 1
    for j in range(order):
        log[x] = j
        x = x * g % k
    z = mpmath.exp(2j * mpmath.pi / order)
    return [lambda a, s=s: 0 if a % k not in log else z ** (s * log[a % k]) for s in range(1, order)]


def product_of_l_values():
    """Residues of zeta_L at s = 1 for abelian L, through Dirichlet L-values."""
    out = {}
    with mpmath.workdps(30):
        out[(5, (-3, 1))] = mpmath.re(mpmath.fprod(l_at_one(c, 5) for c in cyclic_characters(5, 2, 4)))
        out[(2, (-1, 0))] = mpmath.fprod(l_at_one(kronecker(D), abs(D)) for D in (-4, 8, -8))
        out[(5, (-3, 0))] = mpmath.fprod(l_at_one(kronecker(D), abs(D)) for D in (5, -3, -15))
        out[(13, (-1, 0))] = mpmath.fprod(l_at_one(kronecker(D), abs(D)) for D in (13, -4, -52))
    return out


def test_regulator_conversion():
    assert convert_regulator(1) == pytest.approx(2 ** -0.5)
    assert convert_regulator(2.5) == pytest.approx(2.5 * 2 ** -0.5)
    for bad in (0, -1):
        with pytest.raises(DomainError):
            convert_regulator(bad)
    R = make_order(catalog.cm_field(5, (-3, 1)), 1)
    assert regulator_prime(R) == pytest.approx(float(R.regulator) / sqrt(2))


@pytest.mark.parametrize("fd", [(5, (-3, 1)), (2, (-1, 0)), (5, (-3, 0)), (13, (-1, 0))], ids=str)
def test_formula_against_l_values(fd):
    R = make_order(catalog.cm_field(*fd), 1)
    assert residue_formula_rhs(R) == pytest.approx(float(product_of_l_values()[fd]), rel=1e-12)


def test_zeta5_local_ratios():
    L = catalog.cm_field(5, (-3, 1))
    want = {2: Fraction(5, 4), 3: Fraction(10, 9), 5: Fraction(1), 7: Fraction(50, 49)}
    for f, r in want.items():
        assert residue_ratio_local(make_order(L, f)) == r


ORDERS = [((5, (-3, 1)), f) for f in (2, 3, 4, (3, 1), 11)] + \
         [((2, (-1, 0)), f) for f in (2, 3, (1, 2), 5)] + \
         [((2, (-5, -1)), f) for f in (2, 3)] + [((5, (-3, 0)), 4), ((2, (-5, 0)), 3)]


@pytest.mark.parametrize("fd,f", ORDERS, ids=str)
def test_local_ratio_routes(fd, f):
    L = catalog.cm_field(*fd)
    R = make_order(L, f)
    r = local_ratio_by_counts(R)
    assert r == local_ratio_by_euler_factors(R)
    assert residue_formula_rhs(R) / residue_formula_rhs(make_order(L, 1)) == pytest.approx(float(r), rel=1e-12)


def test_estimate_guards():
    R = make_order(catalog.cm_field(5, (-3, 1)), 1)
    with pytest.raises(DomainError):
        residue_estimate(R, 50)
    est = residue_estimate(R, 10 ** 4)
    assert est.oscillation >= 0 and est.prime_bound == 10 ** 4


@pytest.mark.parametrize("fd", [(5, (-3, 1)), (2, (-1, 0)), (5, (-3, 0))], ids=str)
def test_euler_estimate(fd):
    R = make_order(catalog.cm_field(*fd), 1)
    est = residue_estimate(R, 2 * 10 ** 5)
    assert est.value == pytest.approx(residue_formula_rhs(R), rel=5e-3)


def test_estimate_ratio_matches_local_factor():
    # primes above the conductor are the only ones where the two products differ
    L = catalog.cm_field(5, (-3, 1))
    a = residue_estimate(make_order(L, 1), 10 ** 4).value
    for f in (2, 3, 7):
        b = residue_estimate(make_order(L, f), 10 ** 4).value
        assert b / a == pytest.approx(float(residue_ratio_local(make_order(L, f))), rel=1e-12)


def test_report():
    R = make_order(catalog.cm_field(5, (-3, 1)), 2)
    rep = residue_report(R, 10 ** 4, "zeta5-f2")
    assert rep.local_ratio == Fraction(5, 4)
    assert rep.relative_deviation < 0.05
    assert rep.regulator_prime == pytest.approx(rep.regulator / sqrt(2))
