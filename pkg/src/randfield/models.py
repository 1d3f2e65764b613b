"""Parametric covariance / power-spectral-density model families.

Each family is an exact Wiener-Khintchine pair: ``psd_eval`` is the
analytic 2D Fourier transform of ``cov_eval`` (forward kernel
exp(-i*2*pi*f*h)). Single families are separable products of 1D factors;
optional shift frequencies multiply the covariance by cosine factors and
symmetrize the PSD over +/- the shift, which keeps the pair exact and the
PSD nonnegative. The mixed family is the sum of a Gaussian and an
exponential component, each with its own amplitude, lengths and shifts.

Unit-variance 1D factor pairs (l = correlation length):

    exponential  exp(-|h|/l)        <->  2l / (1 + 4 pi^2 l^2 f^2)
    gaussian     exp(-h^2/l^2)      <->  sqrt(pi) l exp(-pi^2 l^2 f^2)
    wave         sinc(h/l)          <->  pi l for |f| <= 1/(2 pi l), else 0
    triangle     tri(h/l)           <->  l sinc^2(pi f l)

with sinc(x) = sin(x)/x and tri(x) = max(0, 1-|x|).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

FAMILIES = ("exponential", "gaussian", "wave", "triangle", "mixed")
SINGLE_FAMILIES = ("exponential", "gaussian", "wave", "triangle")
SINGLE_PARAM_NAMES = ("sigma", "lx", "ly", "fx0", "fy0")
MIXED_PARAM_NAMES = ("sigma1", "lx1", "ly1", "fx0_1", "fy0_1",
                     "sigma2", "lx2", "ly2", "fx0_2", "fy0_2")


@dataclass(frozen=True)
class PsdModel:
    """A covariance/PSD model: one of the single families, or the mixed
    Gaussian + exponential combination.

    Single families use (sigma, lx, ly, fx0, fy0); the mixed family uses
    the ten parameters (sigma1, lx1, ly1, fx0_1, fy0_1) for the Gaussian
    component and (sigma2, lx2, ly2, fx0_2, fy0_2) for the exponential
    component. Negative amplitudes are normalized to their absolute value
    (only sigma^2 enters the formulas); shift frequencies likewise (the
    PSD is symmetric in the shift sign).
    """

    family: str
    sigma: float | None = None
    lx: float | None = None
    ly: float | None = None
    fx0: float | None = None
    fy0: float | None = None
    sigma1: float | None = None
    lx1: float | None = None
    ly1: float | None = None
    fx0_1: float | None = None
    fy0_1: float | None = None
    sigma2: float | None = None
    lx2: float | None = None
    ly2: float | None = None
    fx0_2: float | None = None
    fy0_2: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        for name in self.param_names():
            v = getattr(self, name)
            if v is None:
                raise ValueError(f"{self.family} model requires parameter {name!r}")
            v = float(v)
            if name.startswith("sigma") or name.startswith("f"):
                v = abs(v)
            elif v <= 0.0:
                raise ValueError(f"correlation length {name!r} must be positive")
            if not math.isfinite(v):
                raise ValueError(f"parameter {name!r} must be finite")
            object.__setattr__(self, name, v)

    def param_names(self) -> tuple[str, ...]:
        return MIXED_PARAM_NAMES if self.family == "mixed" else SINGLE_PARAM_NAMES

    def param_values(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.param_names()], dtype=float)

    def with_params(self, values) -> "PsdModel":
        return replace(self, **dict(zip(self.param_names(), (float(v) for v in values))))


def single_model(family: str, sigma: float, lx: float, ly: float,
                 fx0: float = 0.0, fy0: float = 0.0) -> PsdModel:
    return PsdModel(family, sigma=sigma, lx=lx, ly=ly, fx0=fx0, fy0=fy0)


def mixed_model(sigma1: float, lx1: float, ly1: float, fx0_1: float, fy0_1: float,
                sigma2: float, lx2: float, ly2: float, fx0_2: float, fy0_2: float) -> PsdModel:
    return PsdModel("mixed", sigma1=sigma1, lx1=lx1, ly1=ly1, fx0_1=fx0_1, fy0_1=fy0_1,
                    sigma2=sigma2, lx2=lx2, ly2=ly2, fx0_2=fx0_2, fy0_2=fy0_2)


def _cov_factor(family: str, h, l: float) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if family == "exponential":
        return np.exp(-np.abs(h) / l)
    if family == "gaussian":
        return np.exp(-((h / l) ** 2))
    if family == "wave":
        return np.sinc(h / (math.pi * l))  # np.sinc(x) = sin(pi x)/(pi x)
    if family == "triangle":
        return np.maximum(0.0, 1.0 - np.abs(h) / l)
    raise ValueError(f"unknown single family {family!r}")


def _psd_factor(family: str, f, l: float) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if family == "exponential":
        return 2.0 * l / (1.0 + 4.0 * math.pi ** 2 * l ** 2 * f ** 2)
    if family == "gaussian":
        return math.sqrt(math.pi) * l * np.exp(-(math.pi ** 2) * l ** 2 * f ** 2)
    if family == "wave":
        return math.pi * l * (np.abs(f) <= 1.0 / (2.0 * math.pi * l))
    if family == "triangle":
        return l * np.sinc(f * l) ** 2
    raise ValueError(f"unknown single family {family!r}")


def _psd_factor_shifted(family: str, f, l: float, f0: float) -> np.ndarray:
    """Per-axis transform of cov_factor(h) * cos(2 pi f0 h): the half-sum of
    the factor shifted to +/- f0."""
    if f0 == 0.0:
        return _psd_factor(family, f, l)
    f = np.asarray(f, dtype=float)
    return 0.5 * (_psd_factor(family, f - f0, l) + _psd_factor(family, f + f0, l))


def _component_cov(family: str, hx, hy, sigma, lx, ly, fx0, fy0) -> np.ndarray:
    c = sigma ** 2 * _cov_factor(family, hx, lx) * _cov_factor(family, hy, ly)
    if fx0 != 0.0:
        c = c * np.cos(2.0 * math.pi * fx0 * np.asarray(hx, dtype=float))
    if fy0 != 0.0:
        c = c * np.cos(2.0 * math.pi * fy0 * np.asarray(hy, dtype=float))
    return c


def _component_psd(family: str, fx, fy, sigma, lx, ly, fx0, fy0) -> np.ndarray:
    return (sigma ** 2
            * _psd_factor_shifted(family, fx, lx, fx0)
            * _psd_factor_shifted(family, fy, ly, fy0))


def cov_eval(model: PsdModel, hx, hy) -> np.ndarray:
    """Covariance at lag (hx, hy); broadcasts over array input."""
    if model.family == "mixed":
        return (_component_cov("gaussian", hx, hy, model.sigma1, model.lx1,
                               model.ly1, model.fx0_1, model.fy0_1)
                + _component_cov("exponential", hx, hy, model.sigma2, model.lx2,
                                 model.ly2, model.fx0_2, model.fy0_2))
    return _component_cov(model.family, hx, hy, model.sigma, model.lx,
                          model.ly, model.fx0, model.fy0)


def psd_eval(model: PsdModel, fx, fy) -> np.ndarray:
    """Power spectral density at frequency (fx, fy); broadcasts over arrays."""
    if model.family == "mixed":
        return (_component_psd("gaussian", fx, fy, model.sigma1, model.lx1,
                               model.ly1, model.fx0_1, model.fy0_1)
                + _component_psd("exponential", fx, fy, model.sigma2, model.lx2,
                                 model.ly2, model.fx0_2, model.fy0_2))
    return _component_psd(model.family, fx, fy, model.sigma, model.lx,
                          model.ly, model.fx0, model.fy0)


def model_variance(model: PsdModel) -> float:
    """Total field variance: sigma^2, or sigma1^2 + sigma2^2 for mixed."""
    if model.family == "mixed":
        return model.sigma1 ** 2 + model.sigma2 ** 2
    return model.sigma ** 2


def scale_of_fluctuation(family: str, l: float) -> float:
    """Half the integral of the autocorrelation: l for exponential,
    sqrt(pi)/2 * l for gaussian."""
    if l <= 0.0:
        raise ValueError("correlation length must be positive")
    if family == "exponential":
        return l
    if family == "gaussian":
        return 0.5 * math.sqrt(math.pi) * l
    raise ValueError(f"scale of fluctuation not defined for family {family!r}")


def model_to_dict(model: PsdModel, units: str = "") -> dict:
    d = {"family": model.family}
    d.update({n: getattr(model, n) for n in model.param_names()})
    d["units"] = units
    return d


def model_from_dict(d: dict) -> PsdModel:
    if "family" not in d:
        raise ValueError("model dict requires a 'family' entry")
    family = d["family"]
    names = MIXED_PARAM_NAMES if family == "mixed" else SINGLE_PARAM_NAMES
    missing = [n for n in names if n not in d]
    if missing:
        raise ValueError(f"model dict missing parameters: {missing}")
    return PsdModel(family, **{n: float(d[n]) for n in names})


def save_model(model: PsdModel, path, units: str = "") -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, units), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> PsdModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
