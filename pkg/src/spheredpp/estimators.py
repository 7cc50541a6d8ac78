"""Integrands and the weighted quadrature estimator."""

from dataclasses import dataclass

import numpy as np

from .geometry import as_points, sphere_product_rule


class IntegrandEvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Integrand:
    """A real function on the sphere, vectorised over ``(n, 3)`` arrays."""

    name: str
    func: object
    exact: float | None = None
    exact_note: str = ""

    def __call__(self, points):
        points = as_points(points)
        with np.errstate(all="ignore"):
            vals = np.asarray(self.func(points[..., 0], points[..., 1], points[..., 2]), dtype=float)
        vals = np.broadcast_to(vals, points.shape[:-1])
        if not np.all(np.isfinite(vals)):
            bad = int(np.argmax(~np.isfinite(vals.reshape(-1))))
            raise IntegrandEvaluationError(
                f"integrand {self.name!r} is not finite at point {points.reshape(-1, 3)[bad].tolist()}"
            )
        return vals


@dataclass(frozen=True)
class Estimate:
    value: float
    method: str
    integrand: str
    N: int
    seed: int | None = None


def _step(t):
    return (t >= 0).astype(float)


def _f1(x, y, z):
    return z * z * _step(z)


def _f2(x, y, z):
    return np.power(np.abs(x), 1.5) * y * z * _step(z)


# Analytic values; tests check each against exact_integral_oracle.
BUILTINS = {
    "f1": (_f1, 1.0 / 6.0, "z uniform on [-1,1] under the uniform measure: (1/2) int_0^1 t^2 dt"),
    "f2": (_f2, 0.0, "odd in y"),
    "const1": (lambda x, y, z: np.ones_like(x), 1.0, "probability measure"),
    "coord_z": (lambda x, y, z: z, 0.0, "odd in z"),
}


def builtin_integrand(name):
    try:
        func, exact, note = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown integrand {name!r}; builtins are {', '.join(BUILTINS)}") from None
    return Integrand(name, func, exact, note)


def estimate(sample, f, seed=None):
    """``sum_i w_i f(p_i)`` for a weighted sample."""
    vals = f(sample.points)
    value = float(np.dot(sample.weights, vals))
    return Estimate(value, sample.method, f.name, sample.N, sample.seed if seed is None else seed)


def exact_integral_oracle(f, n_z=512, n_phi=1024):
    """Integral of ``f`` against the uniform probability measure by a
    deterministic product rule (Gauss-Legendre in z, trapezoid in azimuth)."""
    pts, w = sphere_product_rule(n_z, n_phi)
    return float(np.dot(w, f(pts)))


def reweighted(f, psi, name=None):
    """Integrand ``f exp(-psi)``.

    Feeding it to :func:`estimate` with any unbiased sampler estimates
    ``int f exp(-psi) dvol``; for the spherical ensemble this is the
    estimator with kernel diagonal taken for the reweighted measure.
    """

    def func(x, y, z):
        return f.func(x, y, z) * np.exp(-psi(x, y, z))

    return Integrand(name or f"{f.name}*exp(-psi)", func)
