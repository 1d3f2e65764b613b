import numpy as np
import pytest

import randfield as rf


def test_window_value_table_rows():
    assert rf.window_value("blackman", 0, 0, 8, 8) == 1.0
    assert rf.window_value("blackman", 8, 0, 8, 8) == 0.0
    assert abs(rf.window_value("hamming", 8, 8, 8, 8) - 0.0064) < 1e-12
    assert rf.window_value("bartlett", 4, 0, 8, 8) == 0.5
    assert rf.window_value("rectangular", 3, -5, 8, 8) == 1.0
    assert rf.window_value("hann", 9, 0, 8, 8) == 0.0  # outside the half-width
    with pytest.raises(ValueError):
        rf.window_value("blackman", 0, 0, 0, 8)
    with pytest.raises(ValueError):
        rf.window_value("flattop", 0, 0, 8, 8)


def test_bartlett_grid_5x5():
    wg = rf.window_grid("bartlett", rf.GridSpec(5, 5, 1.0, 1.0))
    assert wg.weights[2, 2] == 1.0
    assert wg.weights[0, 0] == 0.0 and wg.weights[4, 4] == 0.0
    assert wg.weights[2, 0] == 0.0  # edge offset +-2 with half-width 2


def test_rectangular_grid_all_ones():
    wg = rf.window_grid("rectangular", rf.GridSpec(7, 4, 2.0, 1.0))
    assert np.array_equal(wg.weights, np.ones((4, 7)))


def test_blackman_symmetry_64():
    wg = rf.window_grid("blackman", rf.GridSpec(64, 64, 1.0, 1.0))
    assert np.abs(wg.weights - wg.weights[::-1, :]).max() <= 1e-15
    assert np.abs(wg.weights - wg.weights[:, ::-1]).max() <= 1e-15


@pytest.mark.parametrize("kind", rf.WINDOW_KINDS)
def test_center_maximum_odd_grids(kind):
    wg = rf.window_grid(kind, rf.GridSpec(33, 17, 1.0, 1.0))
    assert wg.weights.max() == 1.0
    assert wg.weights[8, 16] == 1.0  # center sample


@pytest.mark.parametrize("kind", rf.WINDOW_KINDS)
def test_separability_rank_one(kind):
    wg = rf.window_grid(kind, rf.GridSpec(24, 17, 1.0, 1.0))
    s = np.linalg.svd(wg.weights, compute_uv=False)
    assert s[1] <= 1e-14 * s[0]


def test_energy_values():
    u = rf.window_energy(rf.window_grid("rectangular", rf.GridSpec(10, 10, 1.0, 1.0)))
    assert u == 1.0
    u = rf.window_energy(rf.window_grid("rectangular", rf.GridSpec(10, 10, 2.0, 2.0)))
    assert u == 0.25
    u = rf.window_energy(rf.window_grid("bartlett", rf.GridSpec(101, 101, 1.0, 1.0)))
    assert abs(u - 1.0 / 9.0) < 0.02 * (1.0 / 9.0)
    # brute-force oracle for the same grid
    k = np.arange(101) - 50.0
    w1d = (50.0 - np.abs(k)) / 50.0
    w2d = np.outer(w1d, w1d)
    assert abs(u - (w2d ** 2).sum() / 101.0 ** 2) < 1e-15


def test_energy_monotone_over_taper_sharpness():
    spec = rf.GridSpec(64, 48, 1.0, 1.0)
    u = {k: rf.window_energy(rf.window_grid(k, spec))
         for k in ("rectangular", "hamming", "hann", "blackman")}
    assert u["rectangular"] >= u["hamming"] >= u["hann"] >= u["blackman"]


def test_degenerate_window_rejected():
    # on a 2x2 grid every taper sample sits at the window edge
    with pytest.raises(ValueError, match="degenerate window"):
        rf.window_grid("blackman", rf.GridSpec(2, 2, 1.0, 1.0))
