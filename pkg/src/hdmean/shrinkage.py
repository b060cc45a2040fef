"""Orthogonally equivariant covariance and precision estimation.

All estimators here keep the sample eigenvectors and modify only the
eigenvalues: the classical raw nonlinear shrinker with its isotonizing
repair, the oracle precision shrinker driven by the limiting spectral
transform, the fully data-driven plug-in version of it, and the assembly
of complete precision-matrix estimates for a menu of methods.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression

from .linalg import as_data_matrix, sample_moments, spectral_decompose
from .spectrum import KernelConfig, kernel_stieltjes_estimate

__all__ = [
    "ShrinkageSpectrum",
    "PrecisionEstimate",
    "stein_raw",
    "stein_isotonized",
    "isotonize",
    "lw_oracle",
    "lw_shrink",
    "precision_estimate",
    "PRECISION_METHODS",
]

#: floor factor for clamping nonpositive shrunk values, relative to median(lam)
_CLAMP_EPS = 1e-8


@dataclass
class ShrinkageSpectrum:
    """Per-eigenvalue shrunk values plus provenance.

    ``values`` is the final (safeguarded) spectrum.  ``metadata`` records
    the raw pre-safeguard values and which repairs fired, so downstream
    diagnostics can look at the estimator before any fixups.
    """

    values: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)


@dataclass
class PrecisionEstimate:
    """Symmetric positive definite estimate of an inverse covariance matrix."""

    matrix: np.ndarray
    method: str
    eigenvalues: np.ndarray          # sample eigenvalues, ascending
    eigenvectors: np.ndarray
    precision_spectrum: np.ndarray   # diagonal of U' P U, ascending pairing
    metadata: dict = field(default_factory=dict)


def isotonize(values) -> np.ndarray:
    """Least-squares nondecreasing fit (pool-adjacent-violators).

    Idempotent; returns the input unchanged when already nondecreasing.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot isotonize an empty vector")
    if np.all(np.diff(v) >= 0):
        return v.copy()
    return isotonic_regression(v, increasing=True).x


def stein_raw(eigenvalues, n: int) -> ShrinkageSpectrum:
    """Classical raw equivariant shrinker of the sample eigenvalues.

    For ascending eigenvalues ``lam_i`` of the sample covariance of ``n``
    observations, returns

        n * lam_i / (n - p + 1 - 2 * lam_i * sum_{j != i} 1/(lam_j - lam_i))

    exactly as defined, with no repair: the output may be negative or
    non-monotone, which is precisely what the isotonizing step downstream
    exists to fix.  Repeated eigenvalues make a correction term blow up and
    are reported as an error; a zero denominator likewise.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    p = lam.size
    if p == 0:
        raise ValueError("empty spectrum")
    if p > 1:
        diffs = lam[:, None] - lam[None, :]
        off = ~np.eye(p, dtype=bool)
        if np.any(diffs[off] == 0.0):
            raise ValueError("repeated eigenvalue: pairwise correction is singular")
        with np.errstate(divide="ignore"):
            inv = np.where(off, 1.0 / np.where(off, diffs, 1.0), 0.0)
        # sum_{j != i} 1/(lam_j - lam_i) = -(row sums of inv)
        correction = -inv.sum(axis=1)
    else:
        correction = np.zeros(1)
    denom = n - p + 1 - 2.0 * lam * correction
    if np.any(denom == 0.0):
        i = int(np.argmin(np.abs(denom)))
        raise ValueError(f"zero denominator at eigenvalue index {i}")
    values = n * lam / denom
    return ShrinkageSpectrum(
        values=values,
        method="stein-raw",
        metadata={"n": n, "denominators": denom},
    )


def stein_isotonized(eigenvalues, n: int) -> ShrinkageSpectrum:
    """Raw shrinker followed by isotonization and a positivity floor.

    Exactly repeated eigenvalues (a measure-zero event for continuous data,
    but possible with degenerate inputs) are perturbed by ``1e-10 * lam``
    with a warning before the raw formula is applied.  Values that remain
    nonpositive after isotonization are clamped to ``1e-8 * median(lam)``;
    the clamp is reported in the metadata.
    """
    lam = np.asarray(eigenvalues, dtype=float).copy()
    perturbed = False
    if lam.size > 1 and np.any(np.diff(np.sort(lam)) == 0.0):
        warnings.warn("repeated eigenvalues perturbed by 1e-10*lam before shrinkage")
        order = np.argsort(lam, kind="stable")
        lam[order] = np.sort(lam) * (1.0 + 1e-10 * np.arange(lam.size))
        perturbed = True
    raw = stein_raw(lam, n)
    iso = isotonize(raw.values)
    floor = _CLAMP_EPS * max(float(np.median(lam)), np.finfo(float).tiny)
    clamped = iso < floor
    values = np.where(clamped, floor, iso)
    return ShrinkageSpectrum(
        values=values,
        method="stein-isotonized",
        metadata={
            "n": raw.metadata["n"],
            "raw_values": raw.values,
            "perturbed": perturbed,
            "n_clamped": int(clamped.sum()),
        },
    )


def lw_oracle(lam: float, c: float, re_m: float) -> float:
    """Oracle precision-eigenvalue shrinker.

    Evaluates ``(1 - c - 2*c*lam*re_m) / lam`` where ``re_m`` is the real
    part of the limiting spectral transform at ``lam``.  With the identity
    population covariance the closed-form transform makes this identically
    1 for every ``lam`` inside the bulk; with ``c = 0`` it collapses to the
    plain sample inverse ``1/lam``.
    """
    if lam <= 0:
        raise ValueError("eigenvalue must be positive")
    return (1.0 - c - 2.0 * c * lam * re_m) / lam


def lw_shrink(
    eigenvalues,
    n: int,
    cfg: KernelConfig | None = None,
) -> ShrinkageSpectrum:
    """Data-driven nonlinear shrinkage of the sample eigenvalues.

    Each eigenvalue is mapped to ``lam_i / (1 - c - 2*c*lam_i*re_hat_i)``
    with ``c = p/n`` and ``re_hat_i`` the kernel plug-in estimate of the
    real part of the limiting transform at ``lam_i`` (see
    :func:`hdmean.spectrum.kernel_stieltjes_estimate`).

    The raw plug-in is then safeguarded in three steps, each reported in
    the metadata:

    1. entries whose denominator is nonpositive (possible at finite ``n``,
       impossible in the limit) are replaced by linear interpolation from
       neighboring valid entries;
    2. the vector is isotonized, matching the ordering the limit enjoys
       with probability one;
    3. anything still nonpositive is clamped to ``1e-8 * median(lam)``.

    The final output is therefore strictly positive and nondecreasing.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    p = lam.size
    if p == 0:
        raise ValueError("empty spectrum")
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if p >= n:
        raise ValueError(f"requires p < n, got p={p}, n={n}")
    c = p / n
    cfg = cfg or KernelConfig()
    m_hat = kernel_stieltjes_estimate(lam, cfg, lam, n_obs=n)
    re_hat = np.real(m_hat)
    denom = 1.0 - c - 2.0 * c * lam * re_hat

    bad = denom <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(bad, np.nan, lam / np.where(bad, 1.0, denom))
    interpolated = int(bad.sum())
    if interpolated:
        if bad.all():
            raise ValueError("plug-in denominator nonpositive at every eigenvalue")
        idx = np.arange(p)
        raw_repaired = raw.copy()
        raw_repaired[bad] = np.interp(idx[bad], idx[~bad], raw[~bad])
    else:
        raw_repaired = raw

    iso = isotonize(raw_repaired)
    isotonized = not np.array_equal(iso, raw_repaired)
    floor = _CLAMP_EPS * float(np.median(lam))
    clamped = iso < floor
    values = np.where(clamped, floor, iso)
    return ShrinkageSpectrum(
        values=values,
        method="lw-plugin",
        metadata={
            "n": n,
            "c": c,
            "bandwidth": cfg.bandwidth(n),
            "raw_values": raw,
            "re_hat": re_hat,
            "n_interpolated": interpolated,
            "isotonized": isotonized,
            "n_clamped": int(clamped.sum()),
        },
    )


PRECISION_METHODS = ("sample", "identity", "diagonal", "ridge", "stein", "lw")


def precision_estimate(
    X,
    method: str = "lw",
    cfg: KernelConfig | None = None,
    *,
    ridge: float | None = None,
) -> PrecisionEstimate:
    """Precision-matrix estimate sharing the sample eigenvectors.

    Methods
    -------
    sample
        Plain inverse of the sample covariance; requires ``n - 1 >= p``.
    identity
        The identity matrix, ignoring the data.
    diagonal
        Inverse of the diagonal of the sample covariance.
    ridge
        ``(S + ridge*I)^{-1}``; ``ridge`` must be positive.
    stein
        Equivariant inverse with the isotonized classical shrinker.
    lw
        Equivariant inverse with the data-driven nonlinear shrinker.
    """
    X = as_data_matrix(X)
    n, p = X.shape
    _, S = sample_moments(X)
    dec = spectral_decompose(S)
    lam, U = dec.eigenvalues, dec.eigenvectors
    meta: dict = {"n": n, "p": p}

    if method == "identity":
        return PrecisionEstimate(
            matrix=np.eye(p), method=method, eigenvalues=lam, eigenvectors=U,
            precision_spectrum=np.ones(p), metadata=meta,
        )
    if method == "diagonal":
        diag = np.diag(S)
        if np.any(diag <= 0):
            raise ValueError("nonpositive diagonal entry in the sample covariance")
        M = np.diag(1.0 / diag)
        return PrecisionEstimate(
            matrix=M, method=method, eigenvalues=lam, eigenvectors=U,
            precision_spectrum=np.sort(1.0 / diag), metadata=meta,
        )
    elif method == "ridge":
        if ridge is None or ridge <= 0:
            raise ValueError("ridge method needs a positive ridge value")
        spec = 1.0 / (lam + ridge)
        meta["ridge"] = ridge
    elif method == "sample":
        if n - 1 < p:
            raise ValueError(f"sample inverse needs n-1 >= p, got n={n}, p={p}")
        if lam[0] <= max(np.abs(lam[-1]), 1.0) * 1e-12:
            raise ValueError("sample covariance is singular")
        spec = 1.0 / lam
    elif method == "stein":
        shrunk = stein_isotonized(lam, n)
        spec = 1.0 / shrunk.values
        meta.update(shrinkage=shrunk.metadata, variance_spectrum=shrunk.values)
    elif method == "lw":
        shrunk = lw_shrink(lam, n, cfg)
        spec = 1.0 / shrunk.values
        meta.update(shrinkage=shrunk.metadata, variance_spectrum=shrunk.values)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {PRECISION_METHODS}")

    M = (U * spec) @ U.T
    M = 0.5 * (M + M.T)
    return PrecisionEstimate(
        matrix=M, method=method, eigenvalues=lam, eigenvectors=U,
        precision_spectrum=spec, metadata=meta,
    )
