"""Least-squares fitting of theoretical PSD models to empirical averaged
periodograms, the dimensionless residual, and residual-based model selection.

The optimizer is a damped (Levenberg-Marquardt) least-squares loop:
the Jacobian comes from forward finite differences with relative step 1e-6,
damping is multiplied up on rejected steps and down on accepted ones, and
parameters are kept inside their bounds by projection. Fits run from
several starting points (the data-driven initial guess plus seeded
log-uniform perturbations of it) and the start with the smallest residual
wins, ties going to the lower start index.

Internally the empirical periodogram is normalized by its peak before
fitting and the fitted amplitudes are scaled back afterwards, which makes
the fit exactly equivariant under rescaling of the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import PsdModel, mixed_model, psd_eval, single_model
from .spectral import Periodogram
from .synthesis import substream


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings; the defaults suit the identification pipeline."""

    max_iterations: int = 200
    damping_init: float = 1e-3
    parameter_tolerance: float = 1e-8
    residual_tolerance: float = 1e-10
    n_multistarts: int = 8
    seed: int = 0
    bounds: tuple | None = None

    def __post_init__(self) -> None:
        if self.parameter_tolerance <= 0.0 or self.residual_tolerance <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.n_multistarts < 1:
            raise ValueError("at least one start is required")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    """Winning model with its dimensionless residual and diagnostics."""

    model: PsdModel
    epsilon: float
    iterations: int
    converged: bool
    start_index: int


def _model_grid(model: PsdModel, pgram: Periodogram) -> np.ndarray:
    fxm, fym = pgram.freq_mesh()
    return psd_eval(model, fxm, fym)


def residual_epsilon(empirical: Periodogram, model: PsdModel) -> float:
    """RMS deviation between empirical and theoretical periodogram over the
    full centered frequency grid, normalized by the empirical peak."""
    s = empirical.values
    peak = float(s.max())
    if peak <= 0.0:
        raise ValueError("degenerate periodogram")
    r = s - _model_grid(model, empirical)
    return float(math.sqrt(np.mean(r ** 2)) / peak)


def _template(family: str) -> PsdModel:
    if family == "mixed":
        return mixed_model(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    return single_model(family, 1.0, 1.0, 1.0, 0.0, 0.0)


def _halfwidth_length(profile: np.ndarray, freqs: np.ndarray, i_peak: int,
                      df: float, fallback: float) -> float:
    """Length from the half-maximum half-width of an axis profile through
    the peak, walking toward higher frequency."""
    half = 0.5 * profile[i_peak]
    for i in range(i_peak + 1, len(profile)):
        if profile[i] < half:
            width = max(freqs[i] - freqs[i_peak], 0.5 * df)
            return math.sqrt(math.log(2.0)) / (math.pi * width)
    return fallback


def initial_guess(empirical: Periodogram, family: str) -> PsdModel:
    """Data-driven starting point: amplitude from the discrete integral,
    shifts from the peak location in the positive quadrant, lengths from
    the inverse half-width of the peak along each axis. A flat periodogram
    falls back to domain-scaled defaults."""
    s = empirical.values
    peak = float(s.max())
    if peak <= 0.0:
        raise ValueError("degenerate periodogram")
    spec = empirical.spec
    dfx, dfy = 1.0 / spec.extent_x, 1.0 / spec.extent_y
    mass = float(s.sum() * dfx * dfy)
    fallback_lx, fallback_ly = spec.extent_x / 10.0, spec.extent_y / 10.0

    if s.max() - s.min() <= 1e-12 * s.max():
        lx, ly, fx0, fy0 = fallback_lx, fallback_ly, 0.0, 0.0
    else:
        fx, fy = empirical.freq_x(), empirical.freq_y()
        isel = np.flatnonzero(fx >= 0.0)
        jsel = np.flatnonzero(fy >= 0.0)
        quad = s[np.ix_(jsel, isel)]
        jq, iq = np.unravel_index(int(np.argmax(quad)), quad.shape)
        ip, jp = int(isel[iq]), int(jsel[jq])
        fx0, fy0 = float(fx[ip]), float(fy[jp])
        lx = _halfwidth_length(s[jp, :], fx, ip, dfx, fallback_lx)
        ly = _halfwidth_length(s[:, ip], fy, jp, dfy, fallback_ly)

    if family == "mixed":
        amp = math.sqrt(max(mass, 0.0) / 2.0)
        # mild component asymmetry so the two parts start distinguishable
        return mixed_model(amp, 1.5 * lx, 1.5 * ly, fx0, fy0,
                           amp, 0.6 * lx, 0.6 * ly, fx0, fy0)
    return single_model(family, math.sqrt(max(mass, 0.0)), lx, ly, fx0, fy0)


def _default_bounds(family: str, empirical: Periodogram) -> tuple[np.ndarray, np.ndarray]:
    spec = empirical.spec
    dfx, dfy = 1.0 / spec.extent_x, 1.0 / spec.extent_y
    mass = float(empirical.values.sum() * dfx * dfy)
    sig_hi = 10.0 * math.sqrt(max(mass, 0.0))
    len_x = (spec.dx / 2.0, 10.0 * spec.extent_x)
    len_y = (spec.dy / 2.0, 10.0 * spec.extent_y)
    nyq_x = 0.5 / spec.dx
    nyq_y = 0.5 / spec.dy
    per_component = [(0.0, sig_hi), len_x, len_y, (0.0, nyq_x), (0.0, nyq_y)]
    rows = per_component * (2 if family == "mixed" else 1)
    lo = np.array([r[0] for r in rows])
    hi = np.array([r[1] for r in rows])
    return lo, hi


def _sigma_indices(family: str) -> tuple[int, ...]:
    return (0, 5) if family == "mixed" else (0,)


def _shift_indices(family: str) -> tuple[int, ...]:
    return (3, 4, 8, 9) if family == "mixed" else (3, 4)


def _jacobian(fun, theta: np.ndarray, r0: np.ndarray, span: np.ndarray) -> np.ndarray:
    jac = np.empty((r0.size, theta.size))
    for j in range(theta.size):
        h = 1e-6 * (abs(theta[j]) if theta[j] != 0.0 else span[j])
        probe = theta.copy()
        probe[j] += h
        jac[:, j] = (fun(probe) - r0) / h
    return jac


def _levenberg_marquardt(fun, theta0: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                         opts: FitOptions):
    """Damped least squares with bound projection.

    Returns (theta, sse, iterations, converged, accepted_sse_history); the
    history holds the objective after the start point and after every
    accepted step, so it is non-increasing by construction.
    """
    span = np.where(hi - lo > 0.0, hi - lo, 1.0)
    theta = np.clip(theta0, lo, hi)
    r = fun(theta)
    sse = float(r @ r)
    history = [sse]
    lam = opts.damping_init
    iters = 0
    converged = False
    jac_fresh = False
    while iters < opts.max_iterations:
        if not jac_fresh:
            jac = _jacobian(fun, theta, r, span)
            jtj = jac.T @ jac
            jtr = jac.T @ r
            diag = np.diag(jtj).copy()
            diag[diag <= 0.0] = 1.0
            jac_fresh = True
        iters += 1
        try:
            step = np.linalg.solve(jtj + lam * np.diag(diag), -jtr)
        except np.linalg.LinAlgError:
            lam = min(lam * 10.0, 1e14)
            continue
        cand = np.clip(theta + step, lo, hi)
        rc = fun(cand)
        sc = float(rc @ rc)
        if sc <= sse:
            moved = float(np.linalg.norm(cand - theta))
            decrease = sse - sc
            theta, r, sse = cand, rc, sc
            history.append(sse)
            lam = max(lam * 0.1, 1e-14)
            jac_fresh = False
            if moved <= opts.parameter_tolerance * (float(np.linalg.norm(theta))
                                                    + opts.parameter_tolerance):
                converged = True
                break
            if decrease <= opts.residual_tolerance * max(sse, 1e-300):
                converged = True
                break
        else:
            lam = min(lam * 10.0, 1e14)
    return theta, sse, iters, converged, np.array(history)


def _perturbed_start(theta0: np.ndarray, family: str, lo: np.ndarray, hi: np.ndarray,
                     seed: int, start: int) -> np.ndarray:
    rng = substream(seed, start)
    theta = theta0.copy()
    shift_idx = set(_shift_indices(family))
    for j in range(theta.size):
        if j in shift_idx and theta[j] == 0.0:
            theta[j] = rng.uniform(0.0, hi[j] / 8.0)
        else:
            theta[j] = theta[j] * math.exp(rng.uniform(-math.log(4.0), math.log(4.0)))
    return np.clip(theta, lo, hi)


def fit_psd(empirical: Periodogram, family: str, options: FitOptions | None = None) -> FitResult:
    """Fit one model family to the empirical periodogram.

    The objective is the plain sum of squared deviations over the full
    centered frequency grid, except that the zero-frequency bin is left out
    when the periodogram was computed with the mean removed (its value is
    then an artifact of the centering). The reported epsilon is always the
    full-grid residual of the winner.
    """
    opts = options if options is not None else FitOptions()
    s = empirical.values
    peak = float(s.max())
    if peak <= 0.0:
        raise ValueError("degenerate periodogram")
    fxm, fym = empirical.freq_mesh()
    keep = np.ones(s.shape, dtype=bool)
    if empirical.demean:
        keep[empirical.spec.ny // 2, empirical.spec.nx // 2] = False
    fx_fit = fxm[keep]
    fy_fit = fym[keep]
    y = s[keep] / peak

    template = _template(family)
    n_params = len(template.param_names())
    if opts.bounds is not None:
        b = np.asarray(opts.bounds, dtype=float)
        if b.shape != (n_params, 2):
            raise ValueError(f"bounds must provide {n_params} (lower, upper) pairs")
        lo, hi = b[:, 0].copy(), b[:, 1].copy()
    else:
        lo, hi = _default_bounds(family, empirical)

    # normalize amplitudes by the peak so the fit is scale equivariant
    root = math.sqrt(peak)
    sig = list(_sigma_indices(family))
    lo_s, hi_s = lo.copy(), hi.copy()
    lo_s[sig] /= root
    hi_s[sig] /= root

    def residual(theta: np.ndarray) -> np.ndarray:
        return psd_eval(template.with_params(theta), fx_fit, fy_fit) - y

    guess = initial_guess(empirical, family).param_values()
    guess[sig] /= root

    best = None
    for start in range(opts.n_multistarts):
        theta0 = guess if start == 0 else _perturbed_start(guess, family, lo_s, hi_s,
                                                           opts.seed, start)
        theta, _, iters, converged, _ = _levenberg_marquardt(residual, theta0, lo_s,
                                                             hi_s, opts)
        theta_out = theta.copy()
        theta_out[sig] *= root
        model = template.with_params(theta_out)
        eps = residual_epsilon(empirical, model)
        cand = FitResult(model, eps, iters, converged, start)
        if best is None or (cand.epsilon, cand.start_index) < (best.epsilon, best.start_index):
            best = cand
    return best


def select_model(empirical: Periodogram, families, options: FitOptions | None = None) -> FitResult:
    """Fit every family and return the smallest-residual result; exact ties
    go to the model with fewer parameters, then to list order."""
    families = list(families)
    if not families:
        raise ValueError("families must be nonempty")
    results = []
    failures = []
    for pos, fam in enumerate(families):
        try:
            res = fit_psd(empirical, fam, options)
        except ValueError as exc:
            failures.append((fam, exc))
            continue
        results.append((res.epsilon, len(res.model.param_names()), pos, res))
    if not results:
        raise ValueError(f"all families failed to fit: {failures}")
    return min(results, key=lambda t: t[:3])[3]
