import warnings

import numpy as np
import pytest
from scipy import integrate

from vacmix.modulation import (ModulationSpec, f_spectrum_per_volume, f_time, tau_from_field_fwhm_fs, tau_from_fs,
                               tau_from_intensity_fwhm_fs, tone_pairs)

SPEC = ModulationSpec(0.01, 10.8, 9.0, 12.6)


def test_f_time_examples():
    assert f_time(SPEC, 0.0) == pytest.approx(0.02)
    assert f_time(SPEC, 500.0) == pytest.approx(0.0, abs=1e-300)
    deg = ModulationSpec(0.01, 3.0, 3.0, 12.6)
    t = np.linspace(-20, 20, 11)
    np.testing.assert_allclose(f_time(deg, t), 0.02 * np.cos(3 * t) * np.exp(-t**2 / (2 * 12.6**2)), atol=1e-16)


def test_single_tone():
    s = ModulationSpec(0.01, 3.0, None, 12.6)
    assert f_time(s, 0.0) == pytest.approx(0.01)
    assert s.tones == (3.0,)


def test_spectrum_peak_and_zero():
    val = f_spectrum_per_volume(SPEC, SPEC.nu1)
    assert val == pytest.approx(SPEC.eps * SPEC.tau * np.sqrt(np.pi / 2), rel=1e-3)
    assert f_spectrum_per_volume(SPEC, 0.0) < 1e-100


def test_spectrum_is_fourier_transform():
    w = 10.1
    re, _ = integrate.quad(lambda t: f_time(SPEC, t) * np.cos(w * t), -120, 120, limit=800, epsabs=1e-14)
    assert f_spectrum_per_volume(SPEC, w) == pytest.approx(re, rel=1e-7)


def test_parseval():
    lhs, _ = integrate.quad(lambda w: f_spectrum_per_volume(SPEC, w) ** 2, -15, 15, points=[-10.8, -9, 9, 10.8],
                            limit=800, epsabs=1e-16)
    rhs, _ = integrate.quad(lambda t: f_time(SPEC, t) ** 2, -120, 120, limit=800, epsabs=1e-16)
    assert lhs / (2 * np.pi) == pytest.approx(rhs, rel=1e-6)


def test_even_and_linear():
    w = np.linspace(-20, 20, 101)
    np.testing.assert_allclose(f_spectrum_per_volume(SPEC, w), f_spectrum_per_volume(SPEC, -w), rtol=1e-13,
                               atol=1e-300)
    np.testing.assert_allclose(f_spectrum_per_volume(SPEC.with_eps(0.02), w), 2 * f_spectrum_per_volume(SPEC, w),
                               rtol=1e-15, atol=1e-300)
    assert f_time(SPEC.with_eps(0.02), 1.3) == pytest.approx(2 * f_time(SPEC, 1.3), rel=1e-15)


def test_peak_positions():
    for nu in SPEC.tones:
        w = np.linspace(nu - 0.5, nu + 0.5, 100001)
        i = np.argmax(f_spectrum_per_volume(SPEC, w))
        assert abs(w[i] - nu) < 1 / (SPEC.tau**2 * nu) + 1e-5


def test_validation_and_warnings():
    with pytest.raises(ValueError):
        ModulationSpec(0.01, 1.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        ModulationSpec(0.01, -1.0, 1.0, 10.0)
    with pytest.warns(UserWarning):
        ModulationSpec(0.5, 10.0, 9.0, 10.0)
    with pytest.warns(UserWarning):
        ModulationSpec(0.01, 1.0, 1.0, 2.0)


def test_tau_conversions():
    assert tau_from_fs(42.0) == pytest.approx(42 * 0.299792458)
    assert tau_from_field_fwhm_fs(100.0) / 0.299792458 == pytest.approx(42.466, abs=1e-3)
    assert tau_from_intensity_fwhm_fs(100.0) / 0.299792458 == pytest.approx(60.056, abs=1e-3)


def test_swapped_and_pairs():
    assert SPEC.swapped().nu1 == SPEC.nu2
    assert len(tone_pairs(SPEC)) == 16
    np.testing.assert_array_equal(SPEC.eps_vector(3), [0, 0.01, 0])
