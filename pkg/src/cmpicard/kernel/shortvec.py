import math

from .linalg import lll_gram, matmul, transpose


def _cholesky_q(gram):
    """Return (q, mu) with x^T G x = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2."""
    n = len(gram)
    a = [list(map(float, r)) for r in gram]
    q = [0.0] * n
    mu = [[0.0] * n for _ in range(n)]
    for i in range(n):
        s = a[i][i] - sum(mu[k][i] ** 2 * q[k] for k in range(i))
        q[i] = s
        for j in range(i + 1, n):
            t = a[i][j] - sum(mu[k][i] * mu[k][j] * q[k] for k in range(i))
            mu[i][j] = t / s
    return q, mu


def short_vectors(gram, bound, reduce=True, limit=None):
    """All nonzero integer vectors x (up to nothing: both x and -x) with
    x^T G x <= bound, for a positive definite float Gram matrix G.

    Coordinates are with respect to the original basis.  ``limit`` caps the
    output length (None: unbounded).
    """
    n = len(gram)
    if reduce:
        t = lll_gram(gram)
        g = matmul(matmul(t, [list(r) for r in gram]), transpose(t))
        g = [list(map(float, r)) for r in g]
    else:
        t = None
        g = gram
    q, mu = _cholesky_q(g)
    if min(q) <= 0:
        raise ValueError("Gram matrix not positive definite")
    bound = float(bound) * (1 + 1e-9) + 1e-9
    out = []
    x = [0] * n
    # recursive enumeration from the last coordinate down
    def rec(i, remaining):
        if limit is not None and len(out) >= limit:
            return
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / q[i])
        lo, hi = math.ceil(c - r - 1e-12), math.floor(c + r + 1e-12)
        for v in range(lo, hi + 1):
            x[i] = v
            rem = remaining - q[i] * (v - c) ** 2
            if rem < -1e-9 * (1 + bound):
                continue
            if i == 0:
                if any(x):
                    out.append(list(x))
            else:
                rec(i - 1, rem)
        x[i] = 0

    rec(n - 1, bound)
    if t is not None:
        out = [[sum(v[k] * t[k][j] for k in range(n)) for j in range(n)] for v in out]
    return out
