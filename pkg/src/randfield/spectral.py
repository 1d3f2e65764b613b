"""Discrete 2D spectral estimators: windowed (modified) periodograms,
ensemble averaging, the direct lag-domain covariance estimator, and the
triangular bias weights of the finite-sample covariance estimator.

Periodogram values live on the centered DFT frequency grid
f_k = k/(n*d), k in [-n/2, n/2), with zero frequency at the grid center.
The estimate is |DFT(z*w)|^2 / (N*M*U) with U the window energy, which
makes it an (asymptotically unbiased) estimate of the physical-units PSD
for any grid spacing. DFT size equals grid size; there is no zero padding.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import Ensemble, GridField, GridSpec, _locked
from .windows import WindowGrid, window_grid


@dataclass(frozen=True)
class Periodogram:
    """PSD estimate on the centered DFT frequency grid, with provenance."""

    spec: GridSpec
    values: np.ndarray
    window: str
    n_averaged: int
    demean: bool

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.spec.ny, self.spec.nx):
            raise ValueError("periodogram values must have shape (ny, nx)")
        if v.min() < 0.0:
            raise ValueError("periodogram values must be nonnegative")
        if self.n_averaged < 1:
            raise ValueError("n_averaged must be at least 1")
        object.__setattr__(self, "values", _locked(v.copy()))

    def freq_x(self) -> np.ndarray:
        return np.fft.fftshift(np.fft.fftfreq(self.spec.nx, self.spec.dx))

    def freq_y(self) -> np.ndarray:
        return np.fft.fftshift(np.fft.fftfreq(self.spec.ny, self.spec.dy))

    def freq_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.freq_x(), self.freq_y())


@dataclass(frozen=True)
class CovarianceGrid:
    """Covariance estimate on the nonnegative lag grid (k*dx, l*dy);
    values[l, k] is the estimate at lag (k*dx, l*dy)."""

    max_lag_x: int
    max_lag_y: int
    dx: float
    dy: float
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.max_lag_y + 1, self.max_lag_x + 1):
            raise ValueError("covariance values must have shape (max_lag_y+1, max_lag_x+1)")
        if v[0, 0] < 0.0:
            raise ValueError("zero-lag covariance must be nonnegative")
        object.__setattr__(self, "values", _locked(v.copy()))

    def lag_x(self) -> np.ndarray:
        return self.dx * np.arange(self.max_lag_x + 1)

    def lag_y(self) -> np.ndarray:
        return self.dy * np.arange(self.max_lag_y + 1)


def modified_periodogram(field: GridField, window: str = "blackman",
                         demean: bool = True,
                         window_weights: WindowGrid | None = None) -> Periodogram:
    """Periodogram of one realization tapered by the given window.

    With ``demean`` the spatial mean is removed before tapering, so the
    estimate describes the fluctuation about the mean rather than carrying
    a zero-frequency spike. ``window_weights`` may pass a precomputed grid
    (it must match the field's spec); this is a pure optimization.
    """
    wg = window_weights if window_weights is not None else window_grid(window, field.spec)
    if wg.spec != field.spec:
        raise ValueError("window grid does not match the field grid")
    z = field.values
    if demean:
        z = z - z.mean()
    t = np.fft.fft2(z * wg.weights)
    p = (t.real ** 2 + t.imag ** 2) / (field.spec.nx * field.spec.ny * wg.energy)
    return Periodogram(field.spec, np.fft.fftshift(p), wg.kind, 1, demean)


def average_periodogram(ens: Ensemble, window: str = "blackman",
                        demean: bool = True, workers: int = 1) -> Periodogram:
    """Pointwise mean of the members' modified periodograms.

    Per-realization periodograms may be computed concurrently, but the
    reduction is a sequential fold in ascending member order, so the result
    is bit-reproducible for any worker count.
    """
    wg = window_grid(window, ens.spec)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda f: modified_periodogram(f, window, demean, window_weights=wg).values,
                ens.fields))
    else:
        parts = [modified_periodogram(f, window, demean, window_weights=wg).values
                 for f in ens.fields]
    acc = parts[0].copy()
    for p in parts[1:]:
        acc += p
    acc /= len(parts)
    return Periodogram(ens.spec, acc, window, len(parts), demean)


def covariance_estimate(field: GridField, max_lag_x: int, max_lag_y: int) -> CovarianceGrid:
    """Biased (1/NM-normalized) covariance estimator over one-sided lags.

    C(k, l) = (1/NM) * sum of Z(i+k, j+l)*Z(i, j) over the overlap; the
    caller removes the spatial mean first if the fluctuation covariance is
    wanted.
    """
    nx, ny = field.spec.nx, field.spec.ny
    if not (0 <= max_lag_x < nx and 0 <= max_lag_y < ny):
        raise ValueError("lag out of range")
    v = field.values
    out = np.empty((max_lag_y + 1, max_lag_x + 1))
    for l in range(max_lag_y + 1):
        for k in range(max_lag_x + 1):
            out[l, k] = np.sum(v[l:, k:] * v[:ny - l, :nx - k])
    out /= nx * ny
    return CovarianceGrid(max_lag_x, max_lag_y, field.spec.dx, field.spec.dy, out)


def bartlett_bias_weights(n: int, m: int, max_lag_x: int | None = None,
                          max_lag_y: int | None = None) -> np.ndarray:
    """Triangular bias weights (n-k)/n * (m-l)/m of the finite-sample
    covariance estimator, on the one-sided lag grid; element [l, k] matches
    CovarianceGrid layout. Weights are even in the lag sign and vanish
    beyond (n, m)."""
    if n < 1 or m < 1:
        raise ValueError("sample counts must be at least 1")
    kx = max_lag_x if max_lag_x is not None else n
    ky = max_lag_y if max_lag_y is not None else m
    wk = np.maximum(0.0, (n - np.arange(kx + 1)) / n)
    wl = np.maximum(0.0, (m - np.arange(ky + 1)) / m)
    return np.outer(wl, wk)
