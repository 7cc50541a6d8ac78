"""Node-set generators on the sphere.

Every sampler returns a :class:`WeightedSample` whose weights already
include the inverse kernel diagonal, so ``sum(w * f(points))`` is the
quadrature estimate of the integral against the uniform probability
measure.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import geometry
from .bergman import BergmanKernel
from .matrix_models import spherical_ensemble
from .orthopoly import DegreeSet, is_perfect_square, legendre_table

METHODS = ("iid", "spiral", "spherical", "jacobi")
DEFAULT_SPIRAL_C = 3.6

PROPOSAL_BUDGET = 10_000_000
ENVELOPE_SAFETY = 1.1
ENVELOPE_GRID = 401
CLAMP_TOL = 1e-12
MAX_BATCH = 4096


class EnvelopeViolation(RuntimeError):
    def __init__(self, ratio, step):
        super().__init__(
            f"rejection envelope violated at chain step {step}: "
            f"target / bound = {ratio:.6g} > 1"
        )
        self.ratio = ratio
        self.step = step


class ProposalBudgetExceeded(RuntimeError):
    pass


@dataclass
class WeightedSample:
    points: np.ndarray
    weights: np.ndarray
    method: str
    seed: int | None = None
    chart: np.ndarray | None = None
    square: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ValueError(f"points must have shape (N, 3), got {self.points.shape}")
        if self.weights.shape != (len(self.points),):
            raise ValueError("one weight per point required")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise ValueError("weights must be positive and finite")

    @property
    def N(self):
        return len(self.points)


def _equal_weights(N):
    return np.full(N, 1.0 / N)


def sample_iid_uniform(N, rng, seed=None):
    z = rng.uniform(-1.0, 1.0, N)
    phi = rng.uniform(0.0, 2.0 * np.pi, N)
    rho = np.sqrt(1.0 - z * z)
    pts = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return WeightedSample(pts, _equal_weights(N), "iid", seed)


def spiral_points(N, C=DEFAULT_SPIRAL_C):
    """Generalised spiral points: heights ``1 - (2i - 1)/N`` and azimuth
    ``C sqrt(N) theta_i`` (reduced mod 2 pi)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not C > 0:
        raise ValueError("spiral constant must be positive")
    i = np.arange(1, N + 1)
    z = 1.0 - (2.0 * i - 1.0) / N
    theta = np.arccos(z)
    phi = np.mod(C * math.sqrt(N) * theta, 2.0 * np.pi)
    return geometry.from_spherical(theta, phi)


def sample_spiral(N, rng, C=DEFAULT_SPIRAL_C, seed=None):
    R = geometry.random_rotation(rng)
    pts = geometry.apply_rotation(R, spiral_points(N, C))
    return WeightedSample(pts, _equal_weights(N), "spiral", seed, info={"rotation": R})


def sample_spherical(N, rng, seed=None):
    zeta = spherical_ensemble(N, rng)
    kern = BergmanKernel(N - 1)
    pts = geometry.inverse_stereographic(zeta)
    return WeightedSample(pts, 1.0 / kern.diag(zeta), "spherical", seed, chart=zeta)


def sample_arcsine_2d(rng, size=None):
    """Product arcsine draws ``cos(pi U)`` on each axis."""
    shape = (2,) if size is None else (size, 2)
    return np.cos(np.pi * rng.random(shape))


def arcsine_density_2d(x):
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    with np.errstate(divide="ignore"):
        return 1.0 / (np.pi**2 * s[..., 0] * s[..., 1])


class JacobiSampler:
    """Exact sampler of the projection DPP with Legendre tensor kernel ``K_N``
    on ``[-1, 1]^2``, by the sequential chain rule.

    Step ``j`` draws from ``(K(x,x) - |P_j phi(x)|^2) / (N - j)``, where
    ``P_j`` projects onto the span of the features of the points already
    chosen, using rejection from the product arcsine density with bound
    ``C0 N / (N - j)``.
    """

    def __init__(self, N):
        if not is_perfect_square(N):
            raise ValueError(f"Jacobi sampler needs a perfect-square N, got {N}")
        self.N = N
        self.degrees = DegreeSet(N)
        self.C0 = envelope_constant(N)

    def _chain(self, rng):
        N = self.N
        feats = self.degrees.features
        basis = np.zeros((N, N))
        xs = np.empty((N, 2))
        proposals = 0
        for j in range(N):
            bound = self.C0 * N / (N - j)
            batch = min(int(math.ceil(1.5 * bound)) + 4, MAX_BATCH)
            E = basis[:j]
            while True:
                x = sample_arcsine_2d(rng, batch)
                phi = feats(x)
                resid = np.sum(phi * phi, axis=1)
                if j:
                    coef = phi @ E.T
                    resid = resid - np.sum(coef * coef, axis=1)
                tiny = (resid < 0) & (resid > -CLAMP_TOL)
                resid[tiny] = 0.0
                if np.any(resid < 0):
                    raise RuntimeError(f"negative conditional density at chain step {j}")
                s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
                ratio = resid * np.pi**2 * s[:, 0] * s[:, 1] / ((N - j) * bound)
                if np.any(ratio > 1.0):
                    raise EnvelopeViolation(float(ratio.max()), j)
                u = rng.random(batch)
                hits = np.flatnonzero(u < ratio)
                proposals += batch if hits.size == 0 else int(hits[0]) + 1
                if hits.size:
                    break
                if proposals > PROPOSAL_BUDGET:
                    raise ProposalBudgetExceeded(
                        f"more than {PROPOSAL_BUDGET} proposals for one sample (N={N})"
                    )
            i = hits[0]
            xs[j] = x[i]
            v = phi[i]
            # modified Gram-Schmidt, applied twice
            for _ in range(2):
                for e in E:
                    v = v - (e @ v) * e
            basis[j] = v / np.linalg.norm(v)
        return xs, basis, proposals

    def sample(self, rng, seed=None):
        xs, basis, proposals = self._chain(rng)
        kdiag = self.degrees.kernel_diag(xs)
        pts = geometry.square_to_sphere(xs[:, 0], xs[:, 1])
        gram_err = float(np.max(np.abs(basis @ basis.T - np.eye(self.N))))
        return WeightedSample(
            pts,
            1.0 / (4.0 * kdiag),
            "jacobi",
            seed,
            square=xs,
            info={"proposals": proposals, "gram_error": gram_err},
        )


@lru_cache(maxsize=None)
def envelope_constant(N, grid=ENVELOPE_GRID):
    """``1.1 * max K_N(x,x) pi^2 sqrt(1-x1^2) sqrt(1-x2^2) / N`` over an
    interior grid, equally spaced in ``arccos x``."""
    ds = DegreeSet(N)
    theta = np.pi * (np.arange(grid) + 0.5) / grid
    x = np.cos(theta)
    T = legendre_table(ds.max_degree, x)
    S1 = T[ds.a] ** 2
    S2 = T[ds.b] ** 2
    K = S1.T @ S2
    s = np.sin(theta)
    ratio = K * np.pi**2 * np.outer(s, s) / N
    return ENVELOPE_SAFETY * float(ratio.max())


@lru_cache(maxsize=None)
def jacobi_sampler(N):
    return JacobiSampler(N)


def sample_jacobi_dpp(N, rng, seed=None):
    return jacobi_sampler(N).sample(rng, seed)


def draw(method, N, rng, spiral_c=DEFAULT_SPIRAL_C, seed=None):
    """Dispatch on a method tag."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if method == "iid":
        return sample_iid_uniform(N, rng, seed)
    if method == "spiral":
        return sample_spiral(N, rng, spiral_c, seed)
    if method == "spherical":
        return sample_spherical(N, rng, seed)
    if method == "jacobi":
        return sample_jacobi_dpp(N, rng, seed)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
