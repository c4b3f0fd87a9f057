"""Enumerating CM fields and conductors, and naming them stably."""

import ast
from fractions import Fraction
from functools import lru_cache

from .cm_field import _squarefree_part, make_cm_field
from .errors import DomainError, UnsupportedBaseError
from .kernel.integers import primes_up_to
from .real_quadratic import KIdeal, make_real_quadratic


@lru_cache(maxsize=None)
def base_field(d):
    return make_real_quadratic(d)


def _sqrt_coords(K):
    """s = sqrt(d) in (1, w) coordinates."""
    return (-1, 2) if K.t == 1 else (0, 1)


def parse_gamma(K, text):
    """Read gamma either as "a,b" (coordinates on 1, w) or as an expression in s = sqrt(d)."""
    text = text.strip()
    if "s" not in text and "," in text:
        a, b = (int(c) for c in text.strip("()").split(","))
        return a, b
    node = ast.parse(text, mode="eval").body
    val = _eval(node, K)
    # a + b s  ->  coordinates on (1, w)
    s0, s1 = _sqrt_coords(K)
    x = (val[0] + val[1] * s0, val[1] * s1)
    if any(Fraction(c).denominator != 1 for c in x):
        raise DomainError(f"gamma = {text} is not an algebraic integer")
    return int(x[0]), int(x[1])


def _eval(node, K):
    # values are pairs (a, b) meaning a + b sqrt(d) with rational a, b
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value), Fraction(0)
    if isinstance(node, ast.Name) and node.id == "s":
        return Fraction(0), Fraction(1)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        a, b = _eval(node.operand, K)
        return (-a, -b) if isinstance(node.op, ast.USub) else (a, b)
    if isinstance(node, ast.BinOp):
        x, y = _eval(node.left, K), _eval(node.right, K)
        if isinstance(node.op, ast.Add):
            return x[0] + y[0], x[1] + y[1]
        if isinstance(node.op, ast.Sub):
            return x[0] - y[0], x[1] - y[1]
        if isinstance(node.op, ast.Mult):
            return x[0] * y[0] + K.d * x[1] * y[1], x[0] * y[1] + x[1] * y[0]
        if isinstance(node.op, ast.Div):
            n = y[0] * y[0] - K.d * y[1] * y[1]
            if n == 0:
                raise DomainError("division by zero")
            c = (y[0] / n, -y[1] / n)
            return x[0] * c[0] + K.d * x[1] * c[1], x[0] * c[1] + x[1] * c[0]
    raise DomainError(f"cannot read gamma expression {ast.unparse(node)!r}")


def gamma_normal_form(K, gamma):
    """Squarefree part of gamma, moved by even powers of the unit to the smallest |trace|."""
    gamma = _squarefree_part(K, (int(gamma[0]), int(gamma[1])))
    e2 = K.mul(K.fundamental_unit, K.fundamental_unit)
    e2inv = K.inverse(e2)
    while True:
        moved = [tuple(int(c) for c in K.mul(gamma, u)) for u in (e2, e2inv)]
        best = min([gamma] + moved, key=lambda g: (abs(K.trace(g)), g))
        if best == gamma:
            return gamma
        gamma = best


def field_key(K, gamma):
    """Normal form of gamma, identified with its conjugate (both give the same field)."""
    g = gamma_normal_form(K, gamma)
    c = gamma_normal_form(K, tuple(int(x) for x in K.conj(g)))
    return min(g, c)


def gamma_box(K, bound):
    """Distinct field keys among totally negative a + b w with |a|, |b| <= bound."""
    seen = []
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            g = (a, b)
            if g == (0, 0) or not K.is_totally_negative(g):
                continue
            key = field_key(K, g)
            if key not in seen:
                seen.append(key)
    return sorted(seen)


@lru_cache(maxsize=None)
def cm_field(d, gamma):
    K = base_field(d)
    return make_cm_field(K, gamma)


def conductors_up_to(K, bound):
    """O_K-ideals of norm <= bound, sorted by (norm, Hermite basis)."""
    if bound < 1:
        return []
    primes = []
    for p in primes_up_to(bound):
        for kp, _, _ in K.primes_above(int(p)):
            if kp.norm <= bound:
                primes.append(kp)
    out = [KIdeal(((1, 0), (0, 1)))]
    for kp in primes:
        extra = []
        for I in out:
            J = I
            while J.norm * kp.norm <= bound:
                J = K.ideal_mul(J, kp)
                extra.append(J)
        out += extra
    return sorted(set(out), key=lambda I: (I.norm, I.basis))


def parse_conductor(K, text):
    """An O_K-ideal from a label "a:b:c" or a generator accepted by parse_gamma."""
    if ":" in text:
        return conductor_from_label(text)
    g = parse_gamma(K, text)
    if g == (0, 0):
        raise DomainError("the conductor must be non-zero")
    return K.principal_ideal(g)


def conductor_label(I):
    (a, b), (_, c) = I.basis
    return f"{a}:{b}:{c}"


def conductor_from_label(text):
    a, b, c = (int(x) for x in text.split(":"))
    return KIdeal(((a, b), (0, c)))


def check_base(d):
    K = base_field(d)
    if K.class_number != 1:
        raise UnsupportedBaseError(f"h(Q(sqrt {d})) = {K.class_number}")
    return K
