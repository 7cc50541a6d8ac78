"""Bergman kernel of degree-k holomorphic sections on the round sphere.

Everything is written in the south-centred chart with weight
``phi(zeta) = log(1 + |zeta|^2)`` and reference measure the uniform
probability measure ``dm / (pi (1 + |zeta|^2)^2)``. Magnitudes are handled
in log domain so that large ``k`` never forms ``(1 + zeta conj(xi))^k``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


def log_binom(k, ell):
    return gammaln(k + 1.0) - gammaln(ell + 1.0) - gammaln(k - ell + 1.0)


@dataclass(frozen=True)
class BergmanKernel:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a nonnegative integer, got {self.k!r}")

    @property
    def dim(self):
        """Number of independent sections (and points in the ensemble)."""
        return self.k + 1

    def log_abs2(self, zeta, xi):
        """``log |B(zeta, xi)|^2``; ``-inf`` exactly at antipodal pairs."""
        zeta = np.asarray(zeta, dtype=complex)
        xi = np.asarray(xi, dtype=complex)
        if self.k == 0:
            # the kernel is identically 1, including at antipodes
            return np.zeros(np.broadcast(zeta, xi).shape)
        cross = np.abs(1.0 + zeta * np.conj(xi))
        with np.errstate(divide="ignore"):
            log_cross = np.log(cross)
        return 2.0 * np.log(self.k + 1.0) + self.k * (
            2.0 * log_cross - np.log1p(np.abs(zeta) ** 2) - np.log1p(np.abs(xi) ** 2)
        )

    def __call__(self, zeta, xi):
        """Complex kernel value ``B(zeta, xi)`` including the metric weights."""
        zeta = np.asarray(zeta, dtype=complex)
        xi = np.asarray(xi, dtype=complex)
        w = 1.0 + zeta * np.conj(xi)
        zero = w == 0
        with np.errstate(divide="ignore"):
            log_w = np.log(np.where(zero, 1.0, w))
        expo = self.k * (log_w - 0.5 * np.log1p(np.abs(zeta) ** 2) - 0.5 * np.log1p(np.abs(xi) ** 2))
        val = (self.k + 1.0) * np.exp(expo)
        if self.k > 0:
            val = np.where(zero, 0.0, val)
        return val

    def diag(self, zeta=None):
        """The kernel on the diagonal, which is the constant ``k + 1``."""
        if zeta is None or np.ndim(zeta) == 0:
            return float(self.k + 1)
        return np.full(np.shape(zeta), float(self.k + 1))

    def weighted_harmonic(self, ell, zeta):
        """Orthonormal section ``sqrt(k+1) sqrt(C(k, ell)) zeta^ell`` times
        the metric factor ``(1 + |zeta|^2)^(-k/2)``."""
        if not 0 <= ell <= self.k:
            raise ValueError(f"ell must lie in [0, {self.k}], got {ell}")
        zeta = np.asarray(zeta, dtype=complex)
        r = np.abs(zeta)
        log_mag = 0.5 * np.log(self.k + 1.0) + 0.5 * log_binom(self.k, ell) - 0.5 * self.k * np.log1p(r * r)
        if ell > 0:
            with np.errstate(divide="ignore"):
                log_mag = log_mag + ell * np.log(r)
        return np.exp(log_mag) * np.exp(1j * ell * np.angle(zeta))

    def harmonics(self, zeta):
        """All weighted sections stacked along a leading axis of length k+1."""
        return np.stack([self.weighted_harmonic(ell, zeta) for ell in range(self.k + 1)])
