"""Residue fields O_K / P for primes P of a real quadratic field."""

from fractions import Fraction


class ResidueField:
    """O_K / P as F_p (degree-one P = (p, w - r)) or F_p[w] / (w^2 - t w + n).

    Elements are ints mod p in the first case and pairs mod p in the second.
    """

    def __init__(self, K, p, degree, root=None):
        self.K = K
        self.p = p
        self.degree = degree
        self.root = root
        self.size = p ** degree
        self.zero = 0 if degree == 1 else (0, 0)
        self.one = 1 if degree == 1 else (1, 0)

    @classmethod
    def of_prime(cls, K, ideal, p):
        """Residue field of the K-prime with Hermite basis ``ideal`` over p."""
        if ideal.norm == p:
            # Hermite basis is ((p, 0), (0, 1)) when w lies in P, else ((1, b), (0, p))
            (a, b), _ = ideal.basis
            r = 0 if a == p else (-pow(b, -1, p)) % p
            return cls(K, p, 1, r)
        return cls(K, p, 2)

    def _int(self, c):
        c = Fraction(c)
        return c.numerator * pow(c.denominator, -1, self.p) % self.p

    def reduce(self, x):
        a, b = self._int(x[0]), self._int(x[1])
        if self.degree == 1:
            return (a + b * self.root) % self.p
        return (a, b)

    def lift(self, y):
        if self.degree == 1:
            return (y % self.p, 0)
        return (y[0] % self.p, y[1] % self.p)

    def from_int(self, c):
        return c % self.p if self.degree == 1 else (c % self.p, 0)

    def add(self, x, y):
        if self.degree == 1:
            return (x + y) % self.p
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)

    def sub(self, x, y):
        if self.degree == 1:
            return (x - y) % self.p
        return ((x[0] - y[0]) % self.p, (x[1] - y[1]) % self.p)

    def neg(self, x):
        return self.sub(self.zero, x)

    def mul(self, x, y):
        if self.degree == 1:
            return x * y % self.p
        z = self.K.mul(x, y)
        return (z[0] % self.p, z[1] % self.p)

    def pow(self, x, e):
        out = self.one
        while e:
            if e & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            e >>= 1
        return out

    def inv(self, x):
        if x == self.zero:
            raise ZeroDivisionError
        return self.pow(x, self.size - 2)

    def elements(self):
        if self.degree == 1:
            return range(self.p)
        return ((a, b) for a in range(self.p) for b in range(self.p))

    def is_square(self, x):
        if x == self.zero:
            return True
        if self.p == 2:
            return True
        return self.pow(x, (self.size - 1) // 2) == self.one

    def sqrt(self, x):
        """A square root of x, or None."""
        if x == self.zero:
            return self.zero
        if self.p == 2:
            # Frobenius is bijective: sqrt = x^(q/2)
            return self.pow(x, self.size // 2)
        if not self.is_square(x):
            return None
        q = self.size
        s, m = 0, q - 1
        while m % 2 == 0:
            m //= 2
            s += 1
        z = next(e for e in self.elements() if e != self.zero and not self.is_square(e))
        c = self.pow(z, m)
        t = self.pow(x, m)
        r = self.pow(x, (m + 1) // 2)
        while t != self.one:
            i, t2 = 0, t
            while t2 != self.one:
                t2 = self.mul(t2, t2)
                i += 1
            b = self.pow(c, 1 << (s - i - 1))
            s, c = i, self.mul(b, b)
            t, r = self.mul(t, c), self.mul(r, b)
        return r

    def quadratic_roots(self, b, c):
        """Distinct roots of X^2 + b X + c in the field."""
        if self.p == 2:
            return [x for x in self.elements()
                    if self.add(self.add(self.mul(x, x), self.mul(b, x)), c) == self.zero]
        disc = self.sub(self.mul(b, b), self.mul(self.from_int(4), c))
        s = self.sqrt(disc)
        if s is None:
            return []
        half = self.inv(self.from_int(2))
        r1 = self.mul(self.sub(s, b), half)
        r2 = self.mul(self.sub(self.neg(s), b), half)
        return [r1] if r1 == r2 else [r1, r2]
