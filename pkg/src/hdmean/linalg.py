"""Dense symmetric linear algebra, sample moments, structured covariance
construction, and seeded Gaussian sampling.

Data matrices are plain ``(n, p)`` ndarrays with rows as observations.
Eigenvalues are sorted ascending everywhere in this package, and eigenvector
signs are fixed so that the first nonzero component of each eigenvector is
nonnegative, which makes decompositions reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralDecomposition",
    "as_data_matrix",
    "sample_moments",
    "spectral_decompose",
    "ar1_covariance",
    "sample_mvn",
    "spawn_rng",
]


def as_data_matrix(X) -> np.ndarray:
    """Validate and return an ``(n, p)`` observation matrix.

    Requires at least two rows (the sample covariance uses divisor n-1)
    and all entries finite.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"data matrix must be 2-dimensional, got shape {X.shape}")
    n, p = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if p < 1:
        raise ValueError("need at least 1 variable")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise ValueError(f"non-finite entry at row {bad[0]}, column {bad[1]}")
    return X


def sample_moments(X) -> tuple[np.ndarray, np.ndarray]:
    """Column mean and sample covariance (divisor n-1) of an ``(n, p)`` sample.

    Returns
    -------
    mean : (p,) ndarray
    cov : (p, p) ndarray
        Symmetric positive semidefinite.
    """
    X = as_data_matrix(X)
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (X.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)  # kill rounding asymmetry
    return mean, cov


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    ``matrix @ eigenvectors[:, i] == eigenvalues[i] * eigenvectors[:, i]``
    within floating-point tolerance, and ``eigenvectors`` is orthogonal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U, lam = self.eigenvectors, self.eigenvalues
        return (U * lam) @ U.T


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the first nonzero component is nonnegative."""
    V = U.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        anchor = nz[0] if nz.size else 0
        if col[anchor] < 0:
            V[:, j] = -col
    return V


def spectral_decompose(M, *, sym_tol: float = 1e-8) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix with ascending eigenvalues.

    Raises ``ValueError`` if the input is asymmetric beyond ``sym_tol``
    relative to its magnitude; eigen-solver failures propagate as
    ``numpy.linalg.LinAlgError``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(np.abs(M).max(), 1.0)
    if np.abs(M - M.T).max() > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    lam, U = np.linalg.eigh(0.5 * (M + M.T))
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=_fix_signs(U))


def ar1_covariance(rho: float, p: int) -> np.ndarray:
    """AR(1) covariance with entries ``rho**|i-j|``; positive definite for |rho|<1."""
    if not -1.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")
    if p < 1:
        raise ValueError("dimension must be >= 1")
    idx = np.arange(p)
    return float(rho) ** np.abs(idx[:, None] - idx[None, :]) if rho != 0 else np.eye(p)


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator for stream ``key`` under a master seed.

    Streams with distinct keys are statistically independent, so concurrent
    replicates indexed by ``(replicate, method, ...)`` are reproducible
    regardless of execution order.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def sample_mvn(mean, cov, n: int, seed) -> np.ndarray:
    """Draw ``n`` i.i.d. rows from N(mean, cov) via the Cholesky factor.

    ``seed`` may be an integer or a ``numpy.random.Generator``. Output is
    bitwise reproducible for a fixed seed. Raises
    ``numpy.linalg.LinAlgError`` when ``cov`` is not positive definite.
    """
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.asarray(cov, dtype=float)
    if n < 1:
        raise ValueError("need n >= 1 draws")
    p = mean.shape[0]
    if cov.shape != (p, p):
        raise ValueError(f"covariance shape {cov.shape} does not match mean length {p}")
    root = np.linalg.cholesky(cov)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.standard_normal((n, p)) @ root.T + mean
