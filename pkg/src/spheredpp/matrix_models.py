"""Complex Ginibre matrices and the spherical ensemble ``eig(A B^-1)``."""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

MAX_RETRIES = 8
PIVOT_TOL = 1e-12


class SamplingError(RuntimeError):
    pass


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    converged: bool


def sample_ginibre(n, rng):
    """``n x n`` matrix of i.i.d. standard complex normals (E|z|^2 = 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    g = rng.standard_normal((2, n, n)) * np.sqrt(0.5)
    return g[0] + 1j * g[1]


def eigenvalues_general(M):
    """Eigenvalues of a dense complex matrix (LAPACK ``zgeev``, Schur based)."""
    M = np.asarray(M, dtype=complex)
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError:
        return SpectrumResult(np.empty(0, dtype=complex), False)
    if ev.shape != (M.shape[0],) or not np.all(np.isfinite(ev)):
        return SpectrumResult(np.empty(0, dtype=complex), False)
    return SpectrumResult(ev, True)


def right_divide(A, B):
    """``A B^-1`` by an LU solve of ``B^T X^T = A^T``.

    Returns None when a pivot of ``B`` falls below ``1e-12 ||B||_F``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(B, check_finite=False)
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOL * np.linalg.norm(B):
        return None
    return scipy.linalg.lu_solve((lu, piv), A.T, trans=1, check_finite=False).T


def spherical_ensemble(n, rng):
    """Chart coordinates of the ``n``-point spherical ensemble."""
    for attempt in range(MAX_RETRIES + 1):
        A = sample_ginibre(n, rng)
        B = sample_ginibre(n, rng)
        X = right_divide(A, B)
        if X is not None:
            res = eigenvalues_general(X)
            if res.converged:
                return res.eigenvalues
        log.warning("spherical ensemble draw %d rejected (singular B or eigensolve failure)", attempt)
    raise SamplingError(f"spherical ensemble failed after {MAX_RETRIES} retries (n={n})")
