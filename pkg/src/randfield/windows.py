"""Separable tapering windows and their energy normalizer.

All windows are products of two identical 1D profiles evaluated at the
offset ratio k/N, where k is the (possibly half-integer) offset from the
grid midpoint and N = (n-1)/2 is the half-width. The profile is 1 at the
center and rolls off toward the grid edges; offsets beyond the half-width
evaluate to 0 by definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, _locked

WINDOW_KINDS = ("rectangular", "bartlett", "hann", "hamming", "blackman")


def _profile(kind: str, r: np.ndarray) -> np.ndarray:
    """1D window profile at offset ratio r = k/N, zero outside |r| <= 1."""
    r = np.asarray(r, dtype=float)
    a = np.abs(r)
    if kind == "rectangular":
        w = np.ones_like(r)
    elif kind == "bartlett":
        w = 1.0 - a
    elif kind == "hann":
        w = 0.5 + 0.5 * np.cos(math.pi * r)
    elif kind == "hamming":
        w = 0.54 + 0.46 * np.cos(math.pi * r)
    elif kind == "blackman":
        w = 0.42 + 0.5 * np.cos(math.pi * r) + 0.08 * np.cos(2.0 * math.pi * r)
    else:
        raise ValueError(f"unknown window kind {kind!r}")
    # the cosine coefficient sums are exactly 1 at the center and 0 or
    # positive at the edges; pin the center and clamp the ~1e-17 fp noise
    w = np.where(r == 0.0, 1.0, w)
    return np.clip(np.where(a <= 1.0, w, 0.0), 0.0, 1.0)


@dataclass(frozen=True)
class WindowGrid:
    """Window weights sampled on a grid, plus the energy U used to
    normalize modified periodograms."""

    spec: GridSpec
    weights: np.ndarray
    kind: str
    energy: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.spec.ny, self.spec.nx):
            raise ValueError("weights shape must be (ny, nx)")
        if w.min() < 0.0 or w.max() > 1.0:
            raise ValueError("window weights must lie in [0, 1]")
        if self.energy <= 0.0:
            raise ValueError("degenerate window")
        object.__setattr__(self, "weights", _locked(w.copy()))


def window_value(kind: str, k: float, l: float, n_half: float, m_half: float) -> float:
    """Separable window value at offsets (k, l) with half-widths (n_half, m_half)."""
    if n_half <= 0 or m_half <= 0:
        raise ValueError("window half-widths must be positive")
    return float(_profile(kind, np.asarray(k / n_half)) * _profile(kind, np.asarray(l / m_half)))


def window_grid(kind: str, spec: GridSpec) -> WindowGrid:
    """Window centered on the grid midpoint with half-width (n-1)/2 per axis."""
    rx = (np.arange(spec.nx) - (spec.nx - 1) / 2.0) / ((spec.nx - 1) / 2.0)
    ry = (np.arange(spec.ny) - (spec.ny - 1) / 2.0) / ((spec.ny - 1) / 2.0)
    weights = np.outer(_profile(kind, ry), _profile(kind, rx))
    energy = float(np.sum(weights ** 2) / (spec.extent_x * spec.extent_y))
    if energy <= 0.0:
        raise ValueError("degenerate window")
    return WindowGrid(spec, weights, kind, energy)


def window_energy(w: WindowGrid) -> float:
    """Window energy U = sum(w^2) / (D1*D2) over the physical domain."""
    u = float(np.sum(w.weights ** 2) / (w.spec.extent_x * w.spec.extent_y))
    if u <= 0.0:
        raise ValueError("degenerate window")
    return u
