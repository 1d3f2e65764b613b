"""Identification and simulation of homogeneous 2D Gaussian random fields.

The pipeline estimates the second-order structure of a field sampled on a
regular grid (variance, covariance model, correlation lengths, spectral
shift frequencies) from the ensemble-averaged windowed periodogram, fits
parametric covariance/PSD families to it, and can synthesize new
realizations with the identified covariance. A microstructure module
provides Voronoi-aggregate surrogate stress fields as desk-scale test
inputs.
"""

__version__ = "0.1.0"

from .diagnostics import HomogeneityReport, ensemble_moments, homogeneity_curves
from .fitting import (FitOptions, FitResult, fit_psd, initial_guess,
                      residual_epsilon, select_model)
from .grid import (Ensemble, GridField, GridParseError, GridSpec,
                   ScatteredField, load_grid, load_scattered,
                   project_scattered, save_grid, save_scattered,
                   spatial_stats, trim_margin)
from .microstructure import (Orientation, SlipSystem, Tessellation,
                             equivalent_grain_diameter, max_schmid_factor,
                             resolved_shear, sample_orientations,
                             schmid_tensor, slip_systems_bcc24,
                             surrogate_stress_field, voronoi_tessellation)
from .models import (FAMILIES, PsdModel, cov_eval, load_model, mixed_model,
                     model_from_dict, model_to_dict, model_variance,
                     psd_eval, save_model, scale_of_fluctuation,
                     single_model)
from .spectral import (CovarianceGrid, Periodogram, average_periodogram,
                       bartlett_bias_weights, covariance_estimate,
                       modified_periodogram)
from .synthesis import (SynthesisPlan, embedding_clipped_fraction,
                        simulate_ensemble, simulate_field, substream)
from .windows import (WINDOW_KINDS, WindowGrid, window_energy, window_grid,
                      window_value)

__all__ = [name for name in dir() if not name.startswith("_")]
