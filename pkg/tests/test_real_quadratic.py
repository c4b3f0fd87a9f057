from math import gcd, isqrt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmpicard.errors import DomainError
from cmpicard.forms import canonical, class_number_forms, compose, disc, form_class_group, principal_form
from cmpicard.kernel.integers import is_squarefree
from cmpicard.real_quadratic import different_ideal, make_real_quadratic, narrow_pi0_counts

SQUAREFREE = [d for d in range(2, 60) if is_squarefree(d)]

# class numbers of Q(sqrt d), frozen from the classical tables
CLASS_NUMBERS = {2: 1, 3: 1, 5: 1, 6: 1, 7: 1, 10: 2, 11: 1, 13: 1, 14: 1, 15: 2, 17: 1, 19: 1, 21: 1,
                 22: 1, 23: 1, 26: 2, 29: 1, 30: 2, 31: 1, 33: 1, 34: 2, 35: 2, 37: 1, 38: 1, 39: 2,
                 41: 1, 42: 2, 43: 1, 46: 1, 47: 1, 51: 2, 53: 1, 55: 2, 57: 1, 58: 2, 59: 1}


def test_examples():
    K = make_real_quadratic(5)
    assert (K.discriminant, K.fundamental_unit, K.unit_norm, K.class_number, K.narrow_class_number) == \
        (5, (0, 1), -1, 1, 1)
    K = make_real_quadratic(3)
    assert (K.discriminant, K.fundamental_unit, K.unit_norm, K.class_number, K.narrow_class_number) == \
        (12, (2, 1), 1, 1, 2)
    K = make_real_quadratic(2)
    assert (K.discriminant, K.fundamental_unit, K.unit_norm, K.class_number) == (8, (1, 1), -1, 1)


def test_rejects_bad_d():
    for d in (1, 4, 12, -3):
        with pytest.raises(DomainError):
            make_real_quadratic(d)


def brute_force_unit(d):
    """Smallest a + b w > 1 of norm +-1 with b > 0, by solving for a."""
    t, n = (1, (1 - d) // 4) if d % 4 == 1 else (0, -d)
    w = (t + d ** 0.5) / 2 if t else d ** 0.5
    best = None
    for b in range(1, 20000):
        for s in (1, -1):
            # N(a + b w) = a^2 + t a b + n b^2 = s
            D = t * t * b * b - 4 * (n * b * b - s)
            r = isqrt(D) if D >= 0 else -1
            if r >= 0 and r * r == D:
                for a2 in (-t * b + r, -t * b - r):
                    if a2 % 2 == 0 and a2 // 2 + b * w > 1:
                        x = (a2 // 2, b)
                        if best is None or x[0] + x[1] * w < best[0] + best[1] * w:
                            best = x
        if best is not None:
            return best
    raise AssertionError


@pytest.mark.parametrize("d", [d for d in SQUAREFREE if d < 45])
def test_fundamental_unit_against_norm_search(d):
    K = make_real_quadratic(d)
    assert K.fundamental_unit == brute_force_unit(d)
    assert abs(K.norm(K.fundamental_unit)) == 1


@pytest.mark.parametrize("d", sorted(CLASS_NUMBERS))
def test_class_numbers(d):
    K = make_real_quadratic(d)
    assert K.class_number == CLASS_NUMBERS[d]
    assert K.narrow_class_number == K.class_number * (1 if K.unit_norm == -1 else 2)


def test_narrow_counts():
    assert narrow_pi0_counts(make_real_quadratic(5)) == (1, 1)
    assert narrow_pi0_counts(make_real_quadratic(3)) == (2, 2)
    assert narrow_pi0_counts(make_real_quadratic(2)) == (1, 1)


def test_different():
    for d, norm in ((5, 5), (2, 8), (13, 13), (3, 12)):
        K = make_real_quadratic(d)
        assert different_ideal(K).norm == norm == K.discriminant


def brute_force_reduced(D):
    out = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a) == 0:
                c = (b * b - D) // (4 * a)
                if c >= a and not (c == a and b < 0) and gcd(gcd(a, b), c) == 1:
                    out.append((a, b, c))
    return out


@pytest.mark.parametrize("D", [-3, -4, -20, -23, -47, -56, -71, -84, -163, -260])
def test_imaginary_class_numbers(D):
    assert class_number_forms(D) == len(brute_force_reduced(D))


def test_class_group_structures():
    assert form_class_group(-56).presentation.elementary_divisors == (4,)
    assert form_class_group(-84).presentation.elementary_divisors == (2, 2)
    assert form_class_group(-23).presentation.elementary_divisors == (3,)


@given(st.sampled_from([-23, -47, -71, -104, -56, 40, 60, 136]), st.integers(0, 20), st.integers(0, 20))
def test_composition_is_a_group_law(D, i, j):
    reps = sorted({canonical(f) for f in brute_force_reduced(D)}) if D < 0 else None
    G = form_class_group(D)
    elems = sorted(G.elements)
    f, g = elems[i % len(elems)], elems[j % len(elems)]
    h = compose(f, g)
    assert disc(h) == D
    assert canonical(compose(f, principal_form(D))) == canonical(f)
    assert canonical(compose(f, g)) == canonical(compose(g, f))
    if reps is not None:
        assert canonical(h) in reps
