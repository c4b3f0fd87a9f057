from itertools import product
from math import prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmpicard.kernel.groups import (AbelianGroupPresentation, FiniteGroup, GroupRingElement,
                                    image_order_of_multiplication, quotient_by_subgroup)
from cmpicard.kernel.integers import (factor_integer, is_prime, legendre, primes_up_to, sqrt_mod)
from cmpicard.kernel.linalg import (det, elementary_divisors, hnf, integer_kernel, lll_gram, matmul,
                                    smith_normal_form)
from cmpicard.kernel.polys import RamifiedPrimeError, roots_mod_p, splits_completely_mod_p
from cmpicard.kernel.shortvec import short_vectors

small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n))


def diag(d):
    return [[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]


def test_snf_examples():
    assert smith_normal_form([[2, 4], [6, 8]])[1] == diag([2, 4])
    assert smith_normal_form(diag([1, 1, 1]))[1] == diag([1, 1, 1])
    assert smith_normal_form([[0]])[1] == [[0]]


@settings(max_examples=80, deadline=None)
@given(small_matrices)
def test_snf_is_a_factorization(m):
    u, d, v = smith_normal_form(m)
    assert matmul(matmul(u, m), v) == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    ds = [d[i][i] for i in range(len(d))]
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d)) if i != j)
    nz = [x for x in ds if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert abs(det(m)) == prod(ds)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_hnf_spans_same_lattice(m):
    h = hnf(m)
    if abs(det(m)) and len(m) == len(h):
        assert abs(det(m)) == prod(h[i][i] for i in range(len(h)))


def test_integer_kernel():
    rows = [[1, 2], [2, 4], [3, 6]]
    ker = integer_kernel(rows)
    assert len(ker) == 2
    for c in ker:
        assert all(sum(c[i] * rows[i][j] for i in range(3)) == 0 for j in range(2))


def test_factor_integer_examples():
    assert factor_integer(2000) == [(2, 4), (5, 3)]
    assert factor_integer(1) == []
    assert factor_integer(125) == [(5, 3)]


@given(st.integers(2, 10 ** 12))
def test_factor_integer_reconstructs(n):
    f = factor_integer(n)
    assert prod(p ** e for p, e in f) == n
    assert all(is_prime(p) for p, _ in f)


def test_sieve_matches_trial_division():
    ps = [int(p) for p in primes_up_to(2000)]
    assert ps == [n for n in range(2, 2001) if all(n % d for d in range(2, int(n ** 0.5) + 1))]
    assert len(primes_up_to(10 ** 6)) == 78498


@given(st.sampled_from([3, 5, 7, 11, 13, 17, 97, 101, 65537]), st.integers(0, 10 ** 6))
def test_sqrt_mod(p, a):
    r = sqrt_mod(a, p)
    if legendre(a, p) == -1:
        assert r is None
    else:
        assert r * r % p == a % p


def test_splits_completely_examples():
    f5 = [1, 1, 1, 1, 1]
    assert splits_completely_mod_p(f5, 11)
    assert sorted(roots_mod_p(f5, 11)) == [3, 4, 5, 9]
    assert not splits_completely_mod_p(f5, 2)
    assert splits_completely_mod_p([-1, 1], 7)
    with pytest.raises(RamifiedPrimeError):
        splits_completely_mod_p(f5, 5)


@given(st.lists(st.integers(0, 12), min_size=2, max_size=4))
def test_splitting_against_root_count(roots):
    # (x - r1)...(x - rk) splits mod 13 unless a root repeats
    f = [1]
    for r in roots:
        f = [(a - r * b) for a, b in zip([0] + f, f + [0])]
    if len(set(roots)) == len(roots):
        assert splits_completely_mod_p(f, 13)


def test_image_of_multiplication_examples():
    A = AbelianGroupPresentation
    assert image_order_of_multiplication(A((2, 4)), 4) == 1
    assert image_order_of_multiplication(A((3, 9)), 4) == 27
    assert image_order_of_multiplication(A((2, 6)), 2) == 3


chains = st.lists(st.integers(1, 4), max_size=3).map(
    lambda ks: tuple(d for d in (prod(ks[:i + 1]) for i in range(len(ks))) if d > 1))


@given(chains, st.integers(1, 12))
def test_image_of_multiplication_by_enumeration(chain, m):
    A = AbelianGroupPresentation(chain)
    images = {A.scale(x, m) for x in A.elements()}
    assert image_order_of_multiplication(A, m) == len(images)


def test_quotient_examples():
    A = AbelianGroupPresentation
    assert quotient_by_subgroup(A((4,)), [(2,)]).elementary_divisors == (2,)
    assert quotient_by_subgroup(A((6,)), []).elementary_divisors == (6,)
    # (1, 2) has order 4, so the quotient has order 4; (0, 1) maps to an element of order 4
    assert quotient_by_subgroup(A((2, 8)), [(1, 2)]).elementary_divisors == (4,)


def test_quotient_by_enumeration():
    A = AbelianGroupPresentation((2, 4, 8))
    for g in [(1, 1, 0), (0, 2, 4), (1, 3, 5)]:
        sub = {(0, 0, 0)}
        x = (0, 0, 0)
        while True:
            x = A.add(x, g)
            if x in sub:
                break
            sub.add(x)
        assert quotient_by_subgroup(A, [g]).order == A.order // len(sub)


def test_elementary_divisors():
    assert elementary_divisors([[2, 0], [0, 3]]) == [1, 6]


def test_short_vectors_against_box():
    gram = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    found = {tuple(v) for v in short_vectors(gram, 6)}
    box = set()
    for v in product(range(-3, 4), repeat=3):
        if any(v) and sum(v[i] * v[j] * gram[i][j] for i in range(3) for j in range(3)) <= 6:
            box.add(v)
    assert found == box


def test_lll_exact_on_huge_entries():
    # a basis whose Gram entries overflow doubles still reduces exactly
    big = 10 ** 12
    rows = [[1, big], [0, 1]]
    gram = [[sum(a * b for a, b in zip(r, s)) for s in rows] for r in rows]
    t = lll_gram(gram)
    new = matmul(t, rows)
    assert max(abs(x) for r in new for x in r) <= 1
    assert abs(det(t)) == 1


def test_group_ring_arithmetic():
    elems = list(range(4))
    G = FiniteGroup(elems, lambda a, b: (a + b) % 4)
    one = GroupRingElement.basis(G, 0)
    s = GroupRingElement.basis(G, 1)
    s3 = GroupRingElement.basis(G, 3)
    assert (one + s3) * (one - s3) == one - GroupRingElement.basis(G, 2)
    assert (s * s3) == one
    assert (one + s).augmentation() == 2
