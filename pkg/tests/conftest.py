import numpy as np
import pytest

import randfield as rf

# fitted mixed-model parameter sets used as generator inputs throughout the
# suite (case 1: fixed grain geometry; case 2: random geometry)
CASE1 = dict(sigma1=54.7, lx1=138.4, ly1=159.1, fx0_1=0.00244, fy0_1=0.0,
             sigma2=57.6, lx2=57.5, ly2=63.5, fx0_2=0.00562, fy0_2=0.0028)
CASE2 = dict(sigma1=35.8, lx1=269.5, ly1=174.5, fx0_1=0.00172, fy0_1=0.0,
             sigma2=81.6, lx2=67.2, ly2=70.4, fx0_2=0.004, fy0_2=0.0)
CASE1_VARIANCE = 54.7 ** 2 + 57.6 ** 2  # 6309.85


def case1_model() -> rf.PsdModel:
    return rf.PsdModel("mixed", **CASE1)


def case2_model() -> rf.PsdModel:
    return rf.PsdModel("mixed", **CASE2)


def model_periodogram(model: rf.PsdModel, spec: rf.GridSpec,
                      demean: bool = False) -> rf.Periodogram:
    """Noiseless periodogram whose values are the model PSD on the grid."""
    fx = np.fft.fftshift(np.fft.fftfreq(spec.nx, spec.dx))
    fy = np.fft.fftshift(np.fft.fftfreq(spec.ny, spec.dy))
    mfx, mfy = np.meshgrid(fx, fy)
    return rf.Periodogram(spec, rf.psd_eval(model, mfx, mfy), "rectangular", 1, demean)


@pytest.fixture(scope="session")
def case1_ensemble_80():
    """35 realizations of the case-1 mixed model on the 80x80, dx=dy=10 grid."""
    plan = rf.SynthesisPlan(case1_model(), rf.GridSpec(80, 80, 10.0, 10.0), seed=0)
    return rf.simulate_ensemble(plan, 35)
