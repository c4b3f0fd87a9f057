"""Counting primes that split completely in a quartic CM field, and the
effective Chebotarev bounds they are compared with."""

from dataclasses import dataclass
from math import e, log, sqrt

import mpmath

from .errors import DomainError, UnsupportedCaseError
from .kernel.integers import legendre, primes_up_to, sqrt_mod
from .kernel.polys import RamifiedPrimeError, splits_completely_mod_p

ABSOLUTE_FLOOR = 100.0
LI_REL_TOL = 1e-10


def residue_degrees(L, p):
    """Residue degrees of the primes of O_L over p, and whether p ramifies.

    Away from 2 disc(L) the splitting is read off Legendre symbols of the
    relative discriminant at the primes of K; otherwise the ideal
    factorization decides.
    """
    K = L.base
    if p == 2 or L.abs_discriminant % p == 0:
        primes = L.primes_above(p)
        return sorted(f for _, _, f in primes), any(e > 1 for _, e, _ in primes)
    delta = L.rel_discriminant
    disc_w = (K.t * K.t - 4 * K.n) % p
    if legendre(disc_w, p) == 1:
        root, inv2 = sqrt_mod(disc_w, p), pow(2, -1, p)
        out = []
        for r in ((K.t + root) * inv2 % p, (K.t - root) * inv2 % p):
            out += [1, 1] if legendre(delta[0] + delta[1] * r, p) == 1 else [2]
        return sorted(out), False
    return ([2, 2] if legendre(K.norm(delta), p) == 1 else [4]), False


def is_totally_split(L, p):
    degrees, ramified = residue_degrees(L, p)
    return not ramified and degrees == [1, 1, 1, 1]


def count_totally_split(L, x):
    """Number of unramified primes p <= x splitting completely in L (and so in M)."""
    if x < 2:
        return 0
    return sum(1 for p in primes_up_to(int(x)) if is_totally_split(L, int(p)))


def count_totally_split_poly(L, x):
    """The same count through the minimal polynomial of the primitive element."""
    count = 0
    for p in primes_up_to(int(x)):
        p = int(p)
        if L.abs_discriminant % p == 0:
            continue
        try:
            ok = splits_completely_mod_p(L.absolute_min_poly, p)
        except RamifiedPrimeError:
            ok = all(P.norm == p for P, _, _ in L.primes_above(p)) and len(L.primes_above(p)) == 4
        count += ok
    return count


def lmo_lower_bound(n, x):
    """x / (3 n log x)."""
    if x <= 1:
        raise DomainError("x must exceed 1")
    return x / (3 * n * log(x))


@dataclass(frozen=True)
class Threshold:
    value: float  # 2 (log d)^2 (log log d)^2
    effective: float  # max of value and the absolute floor
    flagged: bool  # d below 16 or value below the floor


def chebotarev_threshold(d, floor=ABSOLUTE_FLOOR):
    """Size of x beyond which the lower bound is claimed, given |disc M| = d."""
    if d <= e:
        return Threshold(floor, floor, True)
    value = 2 * log(d) ** 2 * log(log(d)) ** 2
    flagged = d < 16 or value < floor
    return Threshold(value, max(value, floor), flagged)


def li(x):
    """Integral of 1/log t from 2 to x."""
    if x < 2:
        raise DomainError("Li is used for x >= 2")
    if x == 2:
        return 0.0
    with mpmath.workdps(30):
        # split the range geometrically so the quadrature sees smooth pieces
        pts = [mpmath.mpf(2)]
        while pts[-1] * 16 < x:
            pts.append(pts[-1] * 16)
        pts.append(mpmath.mpf(x))
        val = mpmath.quad(lambda t: 1 / mpmath.log(t), pts)
        check = mpmath.li(x) - mpmath.li(2)
        if abs(val - check) > LI_REL_TOL * abs(check):
            raise ArithmeticError("Li quadrature disagrees with the series value")
        return float(val)


def lmo_interval_check(L, x, kind=None):
    """(|pi_1(x) - Li(x)/n|, x^(1/2) (log d + n log x) / (3 n), whether left <= right)."""
    if kind is None:
        from .galois import galois_type
        kind = galois_type(L)
    if kind == "D4":
        raise UnsupportedCaseError("d_M is not available for D4 fields")
    n = 4
    d = abs(L.abs_discriminant)
    left = abs(count_totally_split(L, x) - li(x) / n)
    right = sqrt(x) * (log(d) + n * log(x)) / (3 * n)
    return left, right, left <= right


@dataclass
class ChebotarevReport:
    field_id: str
    n: int
    d: int
    x: int
    count: int
    li_over_n: float
    lmo_lower: float
    threshold: float
    above_threshold: bool
    lower_bound_holds: bool
    interval_holds: object  # None for D4 fields


def chebotarev_report(L, x, field_id="", floor=ABSOLUTE_FLOOR):
    from .galois import galois_type
    kind = galois_type(L)
    n, d = 4, abs(L.abs_discriminant)
    count = count_totally_split(L, x)
    th = chebotarev_threshold(d, floor)
    lower = lmo_lower_bound(n, x)
    interval = None if kind == "D4" else lmo_interval_check(L, x, kind)[2]
    return ChebotarevReport(field_id, n, d, x, count, li(x) / n if x >= 2 else 0.0, lower,
                            th.effective, x >= th.effective, count >= lower, interval)
