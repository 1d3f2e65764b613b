"""Empirical homogeneity check: convergence of the spatial coefficients of
variation of the running ensemble mean and variance fields.

For a homogeneous field both moment fields flatten out as realizations are
added, so their spatial CVs decay toward zero; a persistent spatial trend
shows up as a plateau of the mean-field CV. No formal hypothesis test is
attached: the report carries the curves plus a simple monotone-trend
summary (the fraction of decreasing steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Ensemble, GridField, spatial_stats
from .synthesis import substream


@dataclass(frozen=True)
class HomogeneityReport:
    """CV-vs-K curves of the running ensemble moments, the full-ensemble
    moment fields, and the fraction of decreasing curve steps."""

    k_values: tuple
    cv_mean: tuple
    cv_var: tuple
    final_mean_field: GridField
    final_var_field: GridField
    frac_decreasing_mean: float
    frac_decreasing_var: float


def ensemble_moments(ens: Ensemble, k: int) -> tuple[GridField, GridField]:
    """Pointwise mean and (K-1)-normalized variance over the first k members."""
    if k < 2:
        raise ValueError("at least 2 realizations are needed for the variance")
    if k > len(ens):
        raise ValueError(f"requested {k} members from an ensemble of {len(ens)}")
    block = np.stack([f.values for f in ens.fields[:k]])
    mean = block.mean(axis=0)
    var = np.square(block - mean).sum(axis=0) / (k - 1)
    return GridField(ens.spec, mean), GridField(ens.spec, var)


def _frac_decreasing(curve: np.ndarray) -> float:
    ok = np.isfinite(curve)
    vals = curve[ok]
    if len(vals) < 2:
        return math.nan
    steps = np.diff(vals)
    return float(np.mean(steps < 0.0))


def homogeneity_curves(ens: Ensemble, shuffle_seed: int | None = None) -> HomogeneityReport:
    """Spatial CV of the running moment fields for K = 2..L.

    Members are taken in ensemble order (prefixes); ``shuffle_seed`` draws a
    random member order instead, for sensitivity checks. An undefined CV
    (zero spatial mean) is recorded as NaN and the curve continues.
    """
    if len(ens) < 3:
        raise ValueError("homogeneity curves need at least 3 realizations")
    fields = ens.fields
    if shuffle_seed is not None:
        order = substream(shuffle_seed, 0).permutation(len(fields))
        fields = tuple(fields[i] for i in order)
        ens = Ensemble(fields)
    ks = tuple(range(2, len(ens) + 1))
    cv_mean, cv_var = [], []
    mean_f = var_f = None
    for k in ks:
        mean_f, var_f = ensemble_moments(ens, k)
        cv_mean.append(spatial_stats(mean_f)[2])
        cv_var.append(spatial_stats(var_f)[2])
    return HomogeneityReport(ks, tuple(cv_mean), tuple(cv_var), mean_f, var_f,
                             _frac_decreasing(np.array(cv_mean)),
                             _frac_decreasing(np.array(cv_var)))
