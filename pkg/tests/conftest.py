import numpy as np
import pytest

from thermal_multipath import (
    DetectionSettings,
    NetworkSpec,
    PathGeometry,
    PolarizationSettings,
    SpectralProfile,
)


@pytest.fixture
def profile():
    return SpectralProfile(omega0=1000.0, delta_omega=1.0, mean_rate=1.0)


@pytest.fixture
def in_regime_geometry():
    # |L - S| = 100 coherence lengths, balanced between control and target.
    return PathGeometry(l_c=100.0, s_c=0.0, l_t=100.0, s_t=0.0)


@pytest.fixture
def detection():
    return DetectionSettings(t_c=0.0, t_t=0.0)


@pytest.fixture
def scalar_spec(in_regime_geometry):
    return NetworkSpec("two_path_scalar", geometry=in_regime_geometry)


@pytest.fixture
def bell_polarization():
    return PolarizationSettings(phi_c=np.pi / 4.0, phi_t=0.0, theta_c=0.0, theta_t=0.0)
