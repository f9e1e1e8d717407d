import math

import numpy as np
import pytest
from scipy.integrate import quad

from thermal_multipath import (
    DetectionSettings,
    GeometryError,
    PathGeometry,
    RegimeThresholds,
    SpectralProfile,
    check_regime,
    effective_detection_time,
    mean_photon_number,
    relative_phase,
)


def test_spectrum_peak_value():
    profile = SpectralProfile(omega0=100.0, delta_omega=1.0, mean_rate=1.0)
    assert mean_photon_number(profile, 100.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))


def test_spectrum_far_tail_is_zero():
    profile = SpectralProfile(omega0=50.0, delta_omega=2.0, mean_rate=3.0)
    assert mean_photon_number(profile, 50.0 + 20 * 2.0) < 1e-80


def test_spectrum_integrates_to_mean_rate():
    # independent quadrature oracle for the normalization
    profile = SpectralProfile(omega0=30.0, delta_omega=1.7, mean_rate=2.5)
    total, _ = quad(lambda w: mean_photon_number(profile, w), 30 - 20 * 1.7, 30 + 20 * 1.7)
    assert total == pytest.approx(profile.mean_rate, rel=1e-9)


def test_spectrum_symmetric_and_decreasing():
    profile = SpectralProfile(omega0=10.0, delta_omega=0.5)
    offsets = np.linspace(0.1, 5.0, 40)
    left = mean_photon_number(profile, 10.0 - offsets)
    right = mean_photon_number(profile, 10.0 + offsets)
    assert np.allclose(left, right)
    assert np.all(np.diff(right) < 0)


def test_profile_validation():
    with pytest.raises(ValueError):
        SpectralProfile(omega0=1.0, delta_omega=0.0)
    with pytest.raises(ValueError):
        SpectralProfile(omega0=1.0, mean_rate=-1.0)
    with pytest.raises(ValueError):
        SpectralProfile(omega0=-1.0)


def test_effective_detection_time():
    assert effective_detection_time(5.0, 2.0, 1.0) == 3.0
    assert effective_detection_time(7.5, 0.0, 2.0) == 7.5
    assert effective_detection_time(0.0, 3.0, 3.0) == -1.0
    with pytest.raises(GeometryError):
        effective_detection_time(1.0, 1.0, 0.0)


def test_geometry_validation():
    with pytest.raises(GeometryError):
        PathGeometry(l_c=-1.0, s_c=0.0, l_t=0.0, s_t=0.0)
    with pytest.raises(GeometryError):
        PathGeometry(l_c=1.0, s_c=0.0, l_t=0.0, s_t=0.0, c=-2.0)


def test_relative_phase_balanced_is_zero():
    profile = SpectralProfile(omega0=123.0)
    geometry = PathGeometry(l_c=40.0, s_c=7.0, l_t=40.0, s_t=7.0)
    assert relative_phase(geometry, profile) == 0.0


def test_relative_phase_direct_substitution():
    profile = SpectralProfile(omega0=1.0)
    geometry = PathGeometry(l_c=10.0 + math.pi, s_c=3.0, l_t=10.0, s_t=3.0)
    assert relative_phase(geometry, profile) == pytest.approx(math.pi)


def test_relative_phase_common_shift_invariance():
    profile = SpectralProfile(omega0=77.0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        l_c, s_c, l_t, s_t = rng.uniform(0, 50, 4)
        d1, d2 = rng.uniform(0, 10, 2)
        base = relative_phase(PathGeometry(l_c, s_c, l_t, s_t), profile)
        shifted = relative_phase(
            PathGeometry(l_c + d1, s_c + d2, l_t + d1, s_t + d2), profile
        )
        assert shifted == pytest.approx(base, abs=1e-9)


def test_check_regime_accepts_canonical_configuration():
    profile = SpectralProfile(omega0=1000.0)
    geometry = PathGeometry(l_c=100.0, s_c=0.0, l_t=100.0, s_t=0.0)
    detection = DetectionSettings(0.0, 0.0)
    report = check_regime(geometry, detection, profile, RegimeThresholds(0.02, 50.0))
    assert report.in_regime
    assert report.same_pair_ratios == (0.0, 0.0)
    assert report.cross_pair_ratios == (100.0, 100.0)
    assert report.path_imbalance_ratio == pytest.approx(100.0)


def test_check_regime_rejects_detection_time_mismatch():
    profile = SpectralProfile(omega0=1000.0)
    geometry = PathGeometry(l_c=100.0, s_c=0.0, l_t=100.0, s_t=0.0)
    report = check_regime(geometry, DetectionSettings(1.0, 0.0), profile)
    assert not report.in_regime
    assert max(report.same_pair_ratios) == pytest.approx(1.0)


def test_check_regime_rejects_balanced_interferometers():
    profile = SpectralProfile(omega0=1000.0)
    geometry = PathGeometry(l_c=10.0, s_c=10.0, l_t=10.0, s_t=10.0)
    report = check_regime(geometry, DetectionSettings(0.0, 0.0), profile)
    assert not report.in_regime
    assert report.cross_pair_ratios == (0.0, 0.0)


def test_check_regime_monotone_in_path_imbalance():
    profile = SpectralProfile(omega0=1000.0)
    detection = DetectionSettings(0.0, 0.0)
    previous_ok = False
    for imbalance in np.linspace(10.0, 400.0, 30):
        geometry = PathGeometry(l_c=imbalance, s_c=0.0, l_t=imbalance, s_t=0.0)
        ok = check_regime(geometry, detection, profile).in_regime
        assert ok or not previous_ok
        previous_ok = ok


def test_threshold_validation():
    with pytest.raises(ValueError):
        RegimeThresholds(small=2.0, large=50.0)
