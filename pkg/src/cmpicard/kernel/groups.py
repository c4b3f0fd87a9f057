"""Finite abelian groups by elementary divisors, black-box structure
computation, and group rings of small finite groups."""

from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod

from .linalg import hnf, smith_normal_form


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Z/d1 x ... x Z/dk with d1 | d2 | ... | dk, every di > 1.

    ``generator_labels`` are opaque handles for the abstract generators (for
    class groups: representative ideals).
    """

    elementary_divisors: tuple = ()
    generator_labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        ds = tuple(int(d) for d in self.elementary_divisors)
        if any(d <= 1 for d in ds):
            raise ValueError(f"elementary divisors must exceed 1: {ds}")
        if any(ds[i + 1] % ds[i] for i in range(len(ds) - 1)):
            raise ValueError(f"divisibility chain fails: {ds}")
        object.__setattr__(self, "elementary_divisors", ds)

    @classmethod
    def from_relations(cls, ngens, relations, labels=()):
        """Presentation of Z^ngens / <relations>, plus the coordinate map.

        Returns (presentation, V, keep) where an exponent vector x maps to
        the presentation coordinates (x·V)[keep[i]] mod d_i.
        """
        if ngens == 0:
            return cls(), [], []
        rows = hnf(relations) if relations else []
        if len(rows) < ngens:
            raise ValueError("relations do not have full rank (group infinite)")
        _, d, v = smith_normal_form(rows)
        diag = [d[i][i] for i in range(ngens)]
        keep = [i for i, x in enumerate(diag) if abs(x) != 1]
        divs = tuple(abs(diag[i]) for i in keep)
        return cls(divs, tuple(labels)), v, keep

    @property
    def order(self):
        return prod(self.elementary_divisors)

    @property
    def rank(self):
        return len(self.elementary_divisors)

    def is_trivial(self):
        return not self.elementary_divisors

    def elements(self):
        return product(*(range(d) for d in self.elementary_divisors))

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.elementary_divisors))

    def scale(self, x, m):
        return tuple((a * m) % d for a, d in zip(x, self.elementary_divisors))

    def element_order(self, x):
        out = 1
        for a, d in zip(x, self.elementary_divisors):
            k = d // gcd(a, d)
            out = out * k // gcd(out, k)
        return out

    def torsion_count(self, m):
        """|A[m]| by the divisor formula."""
        return prod(gcd(d, m) for d in self.elementary_divisors)

    def two_rank(self):
        return sum(1 for d in self.elementary_divisors if d % 2 == 0)

    def __str__(self):
        if not self.elementary_divisors:
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.elementary_divisors)


def image_order_of_multiplication(A, m):
    """|mA| = prod d_i / gcd(d_i, m)."""
    if m < 1:
        raise ValueError("m must be positive")
    return prod(d // gcd(d, m) for d in A.elementary_divisors)


def quotient_by_subgroup(A, gens):
    """A / <gens> with gens given in A's coordinates."""
    ds = A.elementary_divisors
    k = len(ds)
    for g in gens:
        if len(g) != k or any(not (0 <= x < d) for x, d in zip(g, ds)):
            raise ValueError(f"coordinates {g} out of range for {A}")
    if k == 0:
        return AbelianGroupPresentation()
    rels = [[d if i == j else 0 for j in range(k)] for i, d in enumerate(ds)]
    rels += [list(g) for g in gens]
    q, _, _ = AbelianGroupPresentation.from_relations(k, rels)
    return q


@dataclass
class BlackBoxGroup:
    """Finite abelian group known only through canonical elements.

    ``elements`` maps each element found to its exponent vector in the
    generators; ``presentation`` and ``coordinate`` give the structure.
    """

    generators: list
    elements: dict
    presentation: AbelianGroupPresentation
    transform: list
    keep: list

    def coordinate(self, element):
        vec = self.elements[element]
        if not self.keep:
            return ()
        full = [sum(vec[i] * self.transform[i][j] for i in range(len(vec)))
                for j in range(len(self.transform[0]))]
        return tuple(full[j] % d for j, d in zip(self.keep, self.presentation.elementary_divisors))

    @property
    def order(self):
        return len(self.elements)


def blackbox_structure(candidates, mul, identity, target_order=None, max_generators=64):
    """Structure of the subgroup generated by elements drawn from ``candidates``.

    Elements must be hashable canonical forms.  Candidates are consumed in
    order; one that already lies in the current subgroup is skipped.  With
    ``target_order`` the search stops as soon as the subgroup reaches it,
    and raises ResourceError if the candidates run out first.
    """
    gens = []
    glabels = []
    elements = {identity: ()}
    relations = []
    it = iter(candidates)

    def closure(gens):
        k = len(gens)
        elems = {identity: (0,) * k}
        queue = [identity]
        rels = []
        head = 0
        while head < len(queue):
            e = queue[head]
            head += 1
            ve = elems[e]
            for i, g in enumerate(gens):
                n = mul(e, g)
                vn = list(ve)
                vn[i] += 1
                if n in elems:
                    rel = [a - b for a, b in zip(vn, elems[n])]
                    if any(rel):
                        rels.append(rel)
                else:
                    elems[n] = tuple(vn)
                    queue.append(n)
            if len(rels) > 4 * k + 8:
                rels = hnf(rels)
        return elems, (hnf(rels) if rels else [])

    while target_order is None or len(elements) < target_order:
        try:
            c = next(it)
        except StopIteration:
            if target_order is not None:
                raise ResourceError(
                    f"generators exhausted at subgroup order {len(elements)} < {target_order}")
            break
        elem, label = c if isinstance(c, LabelledElement) else (c, c)
        if elem in elements:
            continue
        gens.append(elem)
        glabels.append(label)
        if len(gens) > max_generators:
            raise ResourceError("too many generators")
        elements, relations = closure(gens)
        if target_order is not None and len(elements) > target_order:
            raise ResourceError(f"subgroup order {len(elements)} exceeds target {target_order}")
    pres, v, keep = AbelianGroupPresentation.from_relations(len(gens), relations, glabels)
    if pres.order != len(elements):
        raise AssertionError("relation lattice inconsistent with enumeration")
    return BlackBoxGroup(gens, elements, pres, v, keep)


class LabelledElement(tuple):
    """(element, label) pair for blackbox_structure candidates."""

    def __new__(cls, element, label):
        return super().__new__(cls, (element, label))


class FiniteGroup:
    """A small finite group given by its elements and a multiplication."""

    def __init__(self, elements, mul):
        self.elements = list(elements)
        self.mul = mul
        index = set(self.elements)
        ident = [e for e in self.elements if all(mul(e, x) == x == mul(x, e) for x in self.elements)]
        if len(ident) != 1:
            raise ValueError("no unique identity")
        self.identity = ident[0]
        for a in self.elements:
            for b in self.elements:
                if mul(a, b) not in index:
                    raise ValueError("not closed")
                for c in self.elements:
                    if mul(mul(a, b), c) != mul(a, mul(b, c)):
                        raise ValueError("not associative")

    def inverse(self, a):
        return next(x for x in self.elements if self.mul(a, x) == self.identity)

    def power(self, a, k):
        if k < 0:
            a, k = self.inverse(a), -k
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def order_of(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k


class GroupRingElement:
    """Integer combination of elements of a FiniteGroup, stored sparsely."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs=None):
        self.group = group
        self.coeffs = {g: c for g, c in (coeffs or {}).items() if c}

    @classmethod
    def basis(cls, group, g, c=1):
        return cls(group, {g: c})

    @classmethod
    def from_elements(cls, group, elems):
        out = {}
        for g in elems:
            out[g] = out.get(g, 0) + 1
        return cls(group, out)

    def __add__(self, other):
        if isinstance(other, int):
            other = GroupRingElement(self.group, {self.group.identity: other})
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupRingElement(self.group, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.group, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement(self.group, {g: c * other for g, c in self.coeffs.items()})
        out = {}
        for g, a in self.coeffs.items():
            for h, b in other.coeffs.items():
                k = self.group.mul(g, h)
                out[k] = out.get(k, 0) + a * b
        return GroupRingElement(self.group, out)

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if isinstance(other, int):
            other = GroupRingElement(self.group, {self.group.identity: other})
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def augmentation(self):
        return sum(self.coeffs.values())

    def __repr__(self):
        return " + ".join(f"{c}*{g}" for g, c in sorted(self.coeffs.items(), key=repr)) or "0"
