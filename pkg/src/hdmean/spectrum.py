"""Stieltjes-transform machinery for sample-covariance spectra.

Three evaluation routes are provided:

* the exact finite-``p`` empirical transform of a set of eigenvalues,
* the closed-form limiting transform of the white-noise (identity
  covariance) spectrum on its bulk support, and
* a kernel-smoothed plug-in estimate of the limiting transform built from
  an observed spectrum, using the Epanechnikov kernel together with its
  closed-form Hilbert transform.

Conventions: the transform of a spectral distribution F is
``m(z) = integral dF(t) / (t - z)``.  On the real line its boundary value
has real part equal to the principal-value (Hilbert-transform) integral
and imaginary part ``pi`` times the spectral density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MPModel",
    "KernelConfig",
    "default_bandwidth",
    "empirical_stieltjes",
    "mp_edges",
    "mp_stieltjes",
    "mp_stieltjes_outside",
    "mp_density",
    "kernel_stieltjes_estimate",
]

_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class MPModel:
    """Bulk model of the white-noise sample spectrum at concentration ``c``.

    The support edges are ``(1 - sqrt(c))**2`` and ``(1 + sqrt(c))**2``;
    construction through :func:`mp_edges` guarantees them.
    """

    c: float
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.c < 1.0:
            raise ValueError(f"concentration must lie in [0, 1), got {self.c}")
        s = np.sqrt(self.c)
        if abs(self.lower - (1 - s) ** 2) > 1e-12 or abs(self.upper - (1 + s) ** 2) > 1e-12:
            raise ValueError("support edges inconsistent with the concentration")


def mp_edges(c: float) -> MPModel:
    """Support edges of the limiting white-noise spectrum for ``c`` in [0, 1)."""
    if not 0.0 <= c < 1.0:
        raise ValueError(f"concentration must lie in [0, 1), got {c}")
    s = np.sqrt(c)
    return MPModel(c=float(c), lower=(1.0 - s) ** 2, upper=(1.0 + s) ** 2)


def empirical_stieltjes(eigenvalues, z) -> complex:
    """Exact transform ``(1/p) sum 1/(lam_i - z)`` of a finite spectrum.

    ``z`` may be complex or real.  A real ``z`` equal to one of the
    eigenvalues is a pole and is reported as an error; callers evaluate at
    points bounded away from the spectrum.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise ValueError("empty spectrum")
    z = complex(z)
    if z.imag == 0.0 and np.any(lam == z.real):
        raise ValueError(f"evaluation point {z.real} coincides with an eigenvalue")
    return complex(np.mean(1.0 / (lam - z)))


def mp_stieltjes(x: float, model: MPModel) -> complex:
    """Closed-form boundary transform of the white-noise bulk at interior ``x``.

    Valid for ``model.lower <= x <= model.upper`` with ``c > 0``; the
    imaginary part is nonnegative and vanishes exactly at the edges.  The
    bulk density is ``imag / pi``.
    """
    c = model.c
    if c <= 0.0:
        raise ValueError("closed form requires concentration c > 0")
    if x == 0.0:
        raise ValueError("transform is singular at x = 0")
    if not model.lower <= x <= model.upper:
        raise ValueError(
            f"x={x} outside the bulk support [{model.lower:.6g}, {model.upper:.6g}]"
        )
    re = (1.0 - c - x) / (2.0 * c * x)
    im = np.sqrt(max((model.upper - x) * (x - model.lower), 0.0)) / (2.0 * c * x)
    return complex(re, im)


def mp_stieltjes_outside(x: float, model: MPModel) -> complex:
    """Real-line transform of the white-noise bulk at ``x > 0`` off the support.

    Off the bulk the transform is real: the square root in the closed form
    has a positive argument and the branch is fixed by ``m(x) -> -1/x`` as
    ``x -> +inf``.  Complements :func:`mp_stieltjes`, which covers the bulk.
    """
    c = model.c
    if c <= 0.0:
        raise ValueError("closed form requires concentration c > 0")
    if x <= 0.0:
        raise ValueError("requires x > 0")
    if model.lower < x < model.upper:
        raise ValueError(f"x={x} lies inside the bulk; use mp_stieltjes")
    disc = (1.0 - c - x) ** 2 - 4.0 * c * x
    root = np.sqrt(max(disc, 0.0))
    if x < model.lower:
        root = -root  # branch flips below the bulk so that m(0+) stays finite
    return complex((1.0 - c - x + root) / (2.0 * c * x), 0.0)


def mp_density(x, model: MPModel) -> np.ndarray:
    """Bulk spectral density ``imag[m(x)] / pi``, vectorized; zero off support."""
    x = np.asarray(x, dtype=float)
    inside = (x >= model.lower) & (x <= model.upper) & (x != 0.0)
    out = np.zeros_like(x)
    xs = x[inside]
    out[inside] = np.sqrt((model.upper - xs) * (xs - model.lower)) / (
        2.0 * np.pi * model.c * xs
    )
    return out


@dataclass(frozen=True)
class KernelConfig:
    """Settings for the kernel plug-in transform estimate.

    ``h`` is the global bandwidth; ``None`` selects ``n**(-1/3)`` where
    ``n`` is the sample size behind the spectrum (supplied by the caller).
    Each eigenvalue gets the locally scaled bandwidth ``h * lam_j``.  The
    kernel is fixed to Epanechnikov, whose Hilbert transform has a closed
    form, so no numerical principal-value integration is ever needed.
    """

    h: float | None = None
    kernel: str = "epanechnikov"

    def __post_init__(self):
        if self.kernel != "epanechnikov":
            raise ValueError(f"unsupported kernel {self.kernel!r}")

    def bandwidth(self, n_obs: int | float | None) -> float:
        if self.h is not None:
            if self.h <= 0:
                raise ValueError("bandwidth must be positive")
            return float(self.h)
        if n_obs is None:
            raise ValueError("bandwidth unset and sample size unknown; pass n_obs or set h")
        return default_bandwidth(n_obs)


def default_bandwidth(n_obs: int | float) -> float:
    """Global bandwidth ``n**(-1/3)`` used when no explicit value is given."""
    if n_obs <= 0:
        raise ValueError("sample size must be positive")
    return float(n_obs) ** (-1.0 / 3.0)


def _epanechnikov(y: np.ndarray) -> np.ndarray:
    # kappa(y) = 3/(4 sqrt 5) * (1 - y^2/5)_+  on [-sqrt 5, sqrt 5]
    return 0.75 / _SQRT5 * np.maximum(1.0 - y * y / 5.0, 0.0)


def _epanechnikov_hilbert(y: np.ndarray) -> np.ndarray:
    # (1/pi) PV integral kappa(t)/(t - y) dt, closed form; the log factor
    # vanishes at |y| = sqrt 5 where its argument hits 0.  Far from the
    # support the two closed-form terms cancel catastrophically, so beyond
    # |y| = 1e4 the asymptotic series -(1/pi)(1/y)(1 + 1/y^2 + (15/7)/y^4)
    # (exact kernel moments) takes over; both branches are ~1e-8 accurate
    # at the switch point.
    y = np.asarray(y, dtype=float)
    far = np.abs(y) >= 1e4
    safe = np.where(far, 1.0, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.log(np.abs((_SQRT5 - safe) / (_SQRT5 + safe)))
    log_term = np.where(np.isfinite(log_term), log_term, 0.0)
    closed = (-0.3 / np.pi) * safe + 0.75 / (_SQRT5 * np.pi) * (
        1.0 - safe * safe / 5.0
    ) * log_term
    with np.errstate(divide="ignore"):
        inv = 1.0 / np.where(far, y, 1.0)
    series = -(inv / np.pi) * (1.0 + inv * inv + (15.0 / 7.0) * inv**4)
    return np.where(far, series, closed)


def kernel_stieltjes_estimate(
    eigenvalues,
    cfg: KernelConfig | None,
    x,
    *,
    n_obs: int | float | None = None,
) -> complex | np.ndarray:
    """Kernel-smoothed plug-in for the limiting transform at real ``x``.

    A kernel density estimate with per-eigenvalue bandwidth ``h * lam_j``
    supplies the imaginary part (times ``1/pi``); the matching closed-form
    Hilbert transform of the kernel supplies the real (principal-value)
    part.  Smooth in ``x``; the imaginary part is nonnegative everywhere.

    Parameters
    ----------
    eigenvalues : array_like
        Positive sample eigenvalues.
    cfg : KernelConfig or None
        ``None`` means default settings.
    x : float or array_like
        Real evaluation point(s).
    n_obs : int, optional
        Sample size behind the spectrum; required when ``cfg.h`` is unset.

    Returns
    -------
    complex or ndarray of complex
        Scalar for scalar ``x``, else an array of the same shape.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise ValueError("empty spectrum")
    if np.any(lam <= 0):
        raise ValueError("kernel transform estimate requires positive eigenvalues")
    cfg = cfg or KernelConfig()
    h = cfg.bandwidth(n_obs)
    hj = h * lam

    xs = np.atleast_1d(np.asarray(x, dtype=float))
    y = (xs[:, None] - lam[None, :]) / hj[None, :]
    density = np.mean(_epanechnikov(y) / hj[None, :], axis=1)
    hilbert = np.mean(_epanechnikov_hilbert(y) / hj[None, :], axis=1)
    values = np.pi * hilbert + 1j * np.pi * density
    return complex(values[0]) if np.isscalar(x) or np.ndim(x) == 0 else values
