"""Coordinates on the unit sphere.

Points are stored as float arrays of shape ``(..., 3)``; chart coordinates
are complex numbers ``zeta = (x + iy) / (1 - z)`` (stereographic projection
from the north pole, so the south pole sits at the origin).
"""

import numpy as np

NORTH_POLE_TOL = 1e-14


class ChartError(ValueError):
    """Raised when a point has no coordinate in the south-centred chart."""


def as_points(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {p.shape}")
    return p


def normalize(p):
    p = as_points(p)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def stereographic_south(p):
    """Chart coordinate of sphere point(s) ``p``.

    Raises :class:`ChartError` if any point is within ``1e-14`` of the
    north pole, which has no finite coordinate.
    """
    p = as_points(p)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    # 1 - z = (x^2 + y^2) / (1 + z) on the sphere; the right side keeps full
    # relative precision near the north pole
    denom = np.where(z > 0, (x * x + y * y) / (1.0 + np.abs(z)), 1.0 - z)
    if np.any(denom < NORTH_POLE_TOL):
        raise ChartError("north pole has no coordinate in the south-centred chart")
    return (x + 1j * y) / denom


def inverse_stereographic(zeta):
    """Map chart coordinate(s) back to the sphere.

    Uses ``2 / (1 + |zeta|^2)`` throughout so that eigenvalues with modulus
    far beyond ``1e154`` do not overflow on squaring.
    """
    zeta = np.asarray(zeta, dtype=complex)
    r = np.abs(zeta)
    big = r > 1.0
    # for |zeta| > 1 work with 1/|zeta| to keep every intermediate bounded
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(big, 1.0 / np.where(big, r, 1.0), 0.0)
        s_small = 2.0 / (1.0 + np.where(big, 0.0, r) ** 2)
        s_big = 2.0 * inv * inv / (1.0 + inv * inv)
    s = np.where(big, s_big, s_small)  # 2 / (1 + |zeta|^2)
    # x + iy = zeta * s; for large zeta use the unit phase times 2 r / (1 + r^2)
    phase = zeta / np.where(big, r, 1.0)
    xy = np.where(big, phase * (2.0 * inv / (1.0 + inv * inv)), zeta * s)
    out = np.empty(zeta.shape + (3,))
    out[..., 0] = xy.real
    out[..., 1] = xy.imag
    out[..., 2] = 1.0 - s
    return out


def square_to_sphere(x, y):
    """Area-preserving map from ``[-1, 1]^2`` onto the sphere.

    The first square coordinate becomes the height ``z`` and the second the
    azimuth ``pi (y + 1)``, so that (1/4) Lebesgue measure on the square is
    pushed forward to the uniform probability measure.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    phi = np.pi * (y + 1.0)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), x], axis=-1)


def from_spherical(theta, phi):
    """Polar angle ``theta`` from the north pole, azimuth ``phi``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def random_rotation(rng):
    """Haar-distributed element of SO(3).

    Built from a unit quaternion whose four components are normalised
    standard normals.
    """
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_about_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def apply_rotation(R, p):
    """Rotate point(s) ``p`` by ``R`` and renormalise to unit length."""
    p = as_points(p)
    return normalize(p @ np.asarray(R).T)


def uniform_cap_fraction(z0):
    """Uniform measure of the cap ``{z >= z0}`` (Archimedes' hat-box)."""
    return (1.0 - np.clip(z0, -1.0, 1.0)) / 2.0


def sphere_product_rule(n_z=512, n_phi=1024):
    """Nodes and weights integrating against the uniform probability measure.

    Gauss-Legendre in ``z`` times the trapezoid rule in azimuth; exact for
    polynomials in ``(x, y, z)`` of degree below ``min(2 n_z, n_phi)``.
    """
    z, wz = np.polynomial.legendre.leggauss(n_z)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    rho = np.sqrt(1.0 - z * z)
    pts = np.empty((n_z, n_phi, 3))
    pts[..., 0] = rho[:, None] * np.cos(phi)[None, :]
    pts[..., 1] = rho[:, None] * np.sin(phi)[None, :]
    pts[..., 2] = z[:, None]
    w = np.broadcast_to((wz / 2.0)[:, None] / n_phi, (n_z, n_phi))
    return pts.reshape(-1, 3), w.reshape(-1)
