import numpy as np
import pytest

import randfield as rf


def test_constant_field_periodogram():
    spec = rf.GridSpec(4, 4, 1.0, 1.0)
    f = rf.GridField(spec, np.full(16, 2.0))
    p = rf.modified_periodogram(f, "rectangular", demean=False)
    # |c*N*M|^2 / (N*M*U) = 1024/16 at zero frequency, 0 elsewhere
    assert p.values[2, 2] == 64.0
    off = p.values.copy()
    off[2, 2] = 0.0
    assert np.abs(off).max() < 1e-22
    p2 = rf.modified_periodogram(f, "rectangular", demean=True)
    assert np.abs(p2.values).max() < 1e-25


def test_parseval_identity():
    rng = rf.substream(5, 0)
    f = rf.GridField(rf.GridSpec(48, 36, 1.0, 1.0), rng.standard_normal((36, 48)) * 3 + 7)
    p = rf.modified_periodogram(f, "rectangular", demean=True)
    var = rf.spatial_stats(f)[1]
    assert abs(p.values.mean() - var) <= 1e-10 * var


def test_periodogram_units_follow_spacing():
    # white noise of variance s^2 sampled with spacing d has flat PSD s^2*d^2
    rng = rf.substream(8, 0)
    spec = rf.GridSpec(64, 64, 10.0, 10.0)
    acc = 0.0
    n = 50
    for i in range(n):
        z = rf.substream(8, i).standard_normal((64, 64))
        p = rf.modified_periodogram(rf.GridField(spec, z), "rectangular", demean=False)
        acc += p.values.mean()
    assert acc / n == pytest.approx(100.0, rel=0.02)


def test_average_periodogram_basics():
    spec = rf.GridSpec(8, 8, 1.0, 1.0)
    rng = rf.substream(11, 0)
    f1 = rf.GridField(spec, rng.standard_normal((8, 8)))
    f2 = rf.GridField(spec, rng.standard_normal((8, 8)))
    pair = rf.average_periodogram(rf.Ensemble((f1, f1)), "blackman", True)
    single = rf.modified_periodogram(f1, "blackman", True)
    assert np.array_equal(pair.values, single.values)
    triple = rf.average_periodogram(rf.Ensemble((f1, f1, f1)), "blackman", True)
    assert np.allclose(triple.values, single.values, rtol=1e-14)  # fold rounding
    assert triple.n_averaged == 3
    both = rf.average_periodogram(rf.Ensemble((f1, f2)), "hann", False)
    p1 = rf.modified_periodogram(f1, "hann", False).values
    p2 = rf.modified_periodogram(f2, "hann", False).values
    assert np.allclose(both.values, (p1 + p2) / 2.0, rtol=1e-15)


def test_average_linearity_over_concatenation():
    spec = rf.GridSpec(8, 8, 1.0, 1.0)
    fields = [rf.GridField(spec, rf.substream(12, i).standard_normal((8, 8)))
              for i in range(5)]
    a, b = fields[:2], fields[2:]
    pa = rf.average_periodogram(rf.Ensemble(tuple(a)))
    pb = rf.average_periodogram(rf.Ensemble(tuple(b)))
    pall = rf.average_periodogram(rf.Ensemble(tuple(a + b)))
    weighted = (2 * pa.values + 3 * pb.values) / 5.0
    assert np.abs(pall.values - weighted).max() <= 1e-12 * pall.values.max()


def test_average_worker_count_invariance():
    spec = rf.GridSpec(16, 16, 1.0, 1.0)
    fields = tuple(rf.GridField(spec, rf.substream(13, i).standard_normal((16, 16)))
                   for i in range(8))
    ens = rf.Ensemble(fields)
    serial = rf.average_periodogram(ens, "blackman", True, workers=1)
    threaded = rf.average_periodogram(ens, "blackman", True, workers=4)
    assert np.array_equal(serial.values, threaded.values)


def test_hermitian_symmetry():
    rng = rf.substream(14, 0)
    f = rf.GridField(rf.GridSpec(16, 12, 1.0, 2.0), rng.standard_normal((12, 16)))
    p = rf.modified_periodogram(f, "hamming", True)
    raw = np.fft.ifftshift(p.values)
    mirrored = raw[(-np.arange(12)) % 12][:, (-np.arange(16)) % 16]
    assert np.abs(raw - mirrored).max() <= 1e-10 * raw.max()
    assert p.values.min() >= 0.0


def test_covariance_all_ones_bartlett_taper():
    spec = rf.GridSpec(6, 5, 1.0, 1.0)
    c = rf.covariance_estimate(rf.GridField(spec, np.ones(30)), 3, 3)
    n, m = 6, 5
    for k in range(4):
        for l in range(4):
            assert c.values[l, k] == pytest.approx((n - k) * (m - l) / (n * m), rel=1e-15)


def test_covariance_zero_lag_mean_square():
    rng = rf.substream(15, 0)
    v = rng.standard_normal((7, 9))
    f = rf.GridField(rf.GridSpec(9, 7, 1.0, 1.0), v)
    c = rf.covariance_estimate(f, 2, 2)
    assert c.values[0, 0] == pytest.approx((v ** 2).mean(), rel=1e-14)


def test_covariance_matches_brute_force_exactly():
    # integer-valued field: both routes sum exactly in float64
    rng = rf.substream(16, 0)
    v = rng.integers(-9, 10, size=(3, 3)).astype(float)
    f = rf.GridField(rf.GridSpec(3, 3, 1.0, 1.0), v)
    c = rf.covariance_estimate(f, 2, 2)
    for k in range(3):
        for l in range(3):
            total = 0.0
            for n in range(3 - k):
                for m in range(3 - l):
                    total += v[m + l, n + k] * v[m, n]
            assert c.values[l, k] == total / 9.0
    with pytest.raises(ValueError, match="lag out of range"):
        rf.covariance_estimate(f, 3, 0)


def test_bartlett_bias_weights_values():
    w = rf.bartlett_bias_weights(4, 4)
    assert w[0, 0] == 1.0
    assert w[4, 4] == 0.0
    assert w[2, 1] == pytest.approx(0.375)  # (3/4)*(2/4) at (k,l)=(1,2)
    with pytest.raises(ValueError):
        rf.bartlett_bias_weights(0, 4)


def test_precomputed_window_must_match_grid():
    from randfield import window_grid
    f = rf.GridField(rf.GridSpec(8, 8, 1.0, 1.0), np.ones(64))
    wrong = window_grid("hann", rf.GridSpec(8, 8, 2.0, 1.0))
    with pytest.raises(ValueError, match="window grid does not match"):
        rf.modified_periodogram(f, "hann", window_weights=wrong)


def test_periodogram_export_roundtrip(tmp_path):
    from randfield.cli import load_periodogram, save_periodogram
    spec = rf.GridSpec(16, 12, 2.0, 3.0)
    f = rf.GridField(spec, rf.substream(19, 0).standard_normal((12, 16)))
    p = rf.average_periodogram(rf.Ensemble((f, f)), "hann", True)
    path = tmp_path / "p.rfg"
    save_periodogram(p, path)
    back = load_periodogram(path)
    assert back.spec == p.spec
    assert back.window == "hann"
    assert back.n_averaged == 2
    assert back.demean is True
    assert np.array_equal(back.values, p.values)
