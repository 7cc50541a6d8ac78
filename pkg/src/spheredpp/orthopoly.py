"""Orthonormal Legendre polynomials and the tensor projection kernel on
``[-1, 1]^2`` (Jacobi parameters fixed at zero, Lebesgue base measure)."""

import math

import numpy as np


def legendre_table(nmax, x):
    """Orthonormal Legendre values ``p_0(x), ..., p_nmax(x)``.

    Returns an array of shape ``(nmax + 1,) + x.shape``. The classical
    three-term recurrence
    ``(n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}`` is run on the standard
    polynomials, which stay bounded by one on ``[-1, 1]``, and rescaled by
    ``sqrt((2n+1)/2)`` at the end.
    """
    x = np.asarray(x, dtype=float)
    P = np.empty((nmax + 1,) + x.shape)
    P[0] = 1.0
    if nmax >= 1:
        P[1] = x
    for n in range(1, nmax):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
    scale = np.sqrt((2.0 * np.arange(nmax + 1) + 1.0) / 2.0)
    return P * scale.reshape((-1,) + (1,) * x.ndim)


def legendre_orthonormal(n, x):
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return legendre_table(n, x)[n]


def make_degree_set(N):
    """First ``N`` degree pairs in graded order.

    Pairs are sorted by ``max(a, b)`` and then lexicographically, so every
    perfect square ``m^2`` cuts out exactly ``{0, ..., m-1}^2``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    m = math.isqrt(N - 1) + 1
    pairs = sorted(
        ((a, b) for a in range(m) for b in range(m)),
        key=lambda ab: (max(ab), ab[0], ab[1]),
    )
    return tuple(pairs[:N])


def is_perfect_square(N):
    return N >= 1 and math.isqrt(N) ** 2 == N


class DegreeSet:
    """Ordered degree pairs with precomputed index arrays."""

    def __init__(self, N):
        self.pairs = make_degree_set(N)
        self.a = np.array([p[0] for p in self.pairs])
        self.b = np.array([p[1] for p in self.pairs])
        self.max_degree = int(max(self.a.max(), self.b.max()))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __repr__(self):
        return f"DegreeSet(N={len(self)})"

    def features(self, x):
        """Feature vectors ``p_a(x1) p_b(x2)`` at point(s) ``x`` of shape
        ``(..., 2)``; result has shape ``(..., N)``."""
        x = np.asarray(x, dtype=float)
        t1 = legendre_table(self.max_degree, x[..., 0])
        t2 = legendre_table(self.max_degree, x[..., 1])
        return np.moveaxis(t1[self.a] * t2[self.b], 0, -1)

    def kernel_diag(self, x):
        phi = self.features(x)
        return np.sum(phi * phi, axis=-1)


def feature_vector(ds, x):
    if not isinstance(ds, DegreeSet):
        raise TypeError("expected a DegreeSet")
    return ds.features(x)


def kernel_diag_2d(ds, x):
    return ds.kernel_diag(x)
