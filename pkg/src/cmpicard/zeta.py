"""Residue of the zeta function of an order at s = 1.

The residue is computed from the class number formula for orders, estimated
through a truncated Euler product, and compared with the maximal order
through an exact local factor at the conductor.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import exp, log1p, pi, sqrt

from .chebotarev import residue_degrees
from .errors import DomainError, InconsistencyError
from .kernel.integers import primes_up_to


def residue_formula_rhs(R):
    """2^r1 (2 pi)^r2 |Pic R| Reg R / (|tors R^*| |disc R|^(1/2)) with r1 = 0, r2 = 2."""
    return (2 * pi) ** 2 * R.picard_order * float(R.regulator) / (R.torsion_order * sqrt(abs(R.discriminant)))


def convert_regulator(reg, r1=0, r2=2):
    """Reg' = 2^(-r2) (r1 + 2 r2) (r1 + r2)^(-1/2) Reg."""
    if reg <= 0:
        raise DomainError("regulator must be positive")
    return 2.0 ** -r2 * (r1 + 2 * r2) * (r1 + r2) ** -0.5 * float(reg)


def regulator_prime(R):
    return convert_regulator(R.regulator)


# the residue rings O_L / f O_L and R / f O_L

def _base_residues(R):
    """Representatives of R / f O_L, which is O_K / f."""
    (a, _), (_, c) = R.conductor.basis
    return sorted({R.reduce((x0, x1, 0, 0)) for x0 in range(a) for x1 in range(c)})


def _ring_units(R, elements):
    one = R.reduce(R.field.one)
    units = set()
    for x in elements:
        if x in units:
            continue
        for y in elements:
            if R.mul_mod(x, y) == one:
                units.update((x, y))
                break
    return units


def _maximal_ideals(R, elements):
    """Maximal ideals of the finite ring R / f O_L as sets of residues.

    The ring is a quotient of a Dedekind domain, so every ideal is
    principal and the maximal ones are the maximal proper principal ideals.
    """
    units = _ring_units(R, elements)
    proper = {frozenset(R.mul_mod(x, y) for y in elements) for x in elements if x not in units}
    return [I for I in proper if not any(I < J for J in proper)]


def _units_L_by_ideal_sums(R):
    L = R.field
    g = L.from_base(R.generator)
    return sum(1 for x in R.residue_elements_L() if L.ideal([x, g]).norm == 1)


def local_ratio_by_counts(R):
    """(|(O_L/f)^*| / |(R/f)^*|) (|R/f| / |O_L/f|)."""
    if R.is_maximal:
        return Fraction(1)
    residues = _base_residues(R)
    units_L = _units_L_by_ideal_sums(R)
    units_R = len(_ring_units(R, residues))
    return Fraction(units_L, units_R) * Fraction(len(residues), R.g_ideal_L.norm)


def local_ratio_by_euler_factors(R):
    """prod over primes Q | f O_L of (1 - 1/NQ) over prod over maximal m of R/f of (1 - 1/Nm)."""
    if R.is_maximal:
        return Fraction(1)
    residues = _base_residues(R)
    val = Fraction(1)
    for Q in R.conductor_primes:
        val *= 1 - Fraction(1, Q.norm)
    for m in _maximal_ideals(R, residues):
        val /= 1 - Fraction(len(m), len(residues))
    return val


def residue_ratio_local(R):
    """Res ζ_R / Res ζ_{O_L}, computed two ways that must agree."""
    a = local_ratio_by_counts(R)
    b = local_ratio_by_euler_factors(R)
    if a != b:
        raise InconsistencyError(f"local residue ratio {a} != {b}")
    return a


# Euler product estimate

def _over_p_norms(R, p):
    """Norms of the maximal ideals of R lying over p."""
    L = R.field
    if R.index % p:
        degrees, _ = residue_degrees(L, p)
        return [p ** f for f in degrees]
    K = L.base
    conductor = {kp.basis for kp in R.base_conductor_primes}
    L_primes = L.primes_above(p)
    norms = []
    for kp, _, fk in K.primes_above(p):
        if kp.basis in conductor:
            norms.append(p ** fk)
            continue
        gens = [L.from_base(r) for r in kp.basis]
        norms += [P.norm for P, _, _ in L_primes if all(P.contains(x) for x in gens)]
    return norms


@dataclass(frozen=True)
class EulerEstimate:
    value: float
    oscillation: float  # max relative deviation from value over primes in [P/10, P]
    prime_bound: int


def residue_estimate(R, P):
    """Truncated ζ_R / ζ_Q Euler product at s = 1 with primes p <= P."""
    if P < 100:
        raise DomainError("prime bound must be at least 100")
    primes = [int(p) for p in primes_up_to(int(P))]
    start = P / 10
    s = 0.0
    tail = []
    for p in primes:
        s += log1p(-1 / p)
        for n in _over_p_norms(R, p):
            s -= log1p(-1 / n)
        if p >= start:
            tail.append(s)
    osc = max(abs(t - s) for t in tail) if tail else 0.0
    return EulerEstimate(exp(s), exp(osc) - 1, int(P))


@dataclass
class ResidueReport:
    order_id: str
    rhs_formula: float
    euler_estimate: float
    oscillation: float
    local_ratio: Fraction
    regulator: float
    regulator_prime: float
    prime_bound: int

    @property
    def relative_deviation(self):
        return abs(self.euler_estimate - self.rhs_formula) / self.rhs_formula


def residue_report(R, P, order_id=""):
    est = residue_estimate(R, P)
    return ResidueReport(order_id, residue_formula_rhs(R), est.value, est.oscillation, residue_ratio_local(R),
                         float(R.regulator), regulator_prime(R), P)
