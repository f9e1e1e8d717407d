"""Domain types shared by every engine.

The source is multimode thermal light with a Gaussian spectrum of carrier
frequency omega0, width delta_omega and mean photon rate mean_rate.  Working
units are whatever the caller supplies as long as they are consistent; the
natural choice is delta_omega = 1 and c = 1 so that all the dimensionless
delay products come out directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Raised for unphysical path geometries (e.g. non-positive speed)."""


class ConfigurationError(ValueError):
    """Raised when a network or experiment configuration is inconsistent."""


@dataclass(frozen=True)
class SpectralProfile:
    """Gaussian spectrum of the thermal source."""

    omega0: float
    delta_omega: float = 1.0
    mean_rate: float = 1.0

    def __post_init__(self):
        if self.delta_omega <= 0:
            raise ValueError(f"delta_omega must be > 0, got {self.delta_omega}")
        if self.mean_rate <= 0:
            raise ValueError(f"mean_rate must be > 0, got {self.mean_rate}")
        if self.omega0 < 0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0}")

    @property
    def coherence_time(self) -> float:
        return 1.0 / self.delta_omega


@dataclass(frozen=True)
class PathGeometry:
    """Long/short arm lengths of the control and target interferometers."""

    l_c: float
    s_c: float
    l_t: float
    s_t: float
    c: float = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise GeometryError(f"propagation speed must be > 0, got {self.c}")
        for name in ("l_c", "s_c", "l_t", "s_t"):
            if getattr(self, name) < 0:
                raise GeometryError(f"path length {name} must be >= 0")


@dataclass(frozen=True)
class DetectionSettings:
    """Detection times of the two output detectors (instantaneous sampling)."""

    t_c: float = 0.0
    t_t: float = 0.0

    def __post_init__(self):
        for name in ("t_c", "t_t"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"detection time {name} must be finite")


@dataclass(frozen=True)
class PolarizationSettings:
    """Preparation angles (phi) and analyzer angles (theta), in radians.

    All formulas are 2*pi-periodic so no range restriction is enforced.
    """

    phi_c: float = 0.0
    phi_t: float = 0.0
    theta_c: float = 0.0
    theta_t: float = 0.0

    def __post_init__(self):
        for name in ("phi_c", "phi_t", "theta_c", "theta_t"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"angle {name} must be finite")


@dataclass(frozen=True)
class RegimeThresholds:
    """Numerical stand-ins for the << / >> asymptotic conditions.

    The Gaussian kernel exp(-x^2/2) is >= 0.9998 at x = 0.02 and utterly
    negligible at x = 50, so the defaults sit far inside the asymptotics.
    """

    small: float = 0.02
    large: float = 50.0

    def __post_init__(self):
        if not self.small < 1.0 < self.large:
            raise ValueError("thresholds must satisfy small < 1 < large")


@dataclass(frozen=True)
class RegimeReport:
    """Dimensionless delay products deciding whether only the correlated
    path pairs (L_C, L_T) and (S_C, S_T) contribute."""

    same_pair_ratios: tuple
    cross_pair_ratios: tuple
    path_imbalance_ratio: float
    theta_small: float
    theta_large: float
    in_regime: bool


def mean_photon_number(profile: SpectralProfile, omega):
    """Average photon number per unit frequency at angular frequency omega.

    Gaussian centred on omega0 with width delta_omega, normalized so its
    frequency integral is mean_rate.  Accepts scalars or arrays.
    """
    x = (np.asarray(omega) - profile.omega0) / profile.delta_omega
    norm = profile.mean_rate / (np.sqrt(2.0 * np.pi) * profile.delta_omega)
    return norm * np.exp(-0.5 * x * x)


def effective_detection_time(t: float, l: float, c: float = 1.0) -> float:
    """Detection time minus the propagation delay of path l."""
    if c <= 0:
        raise GeometryError(f"propagation speed must be > 0, got {c}")
    return t - l / c


def relative_phase(geometry: PathGeometry, profile: SpectralProfile) -> float:
    """Carrier phase difference between the two interfering path pairs:
    (omega0/c) * [(L_C - L_T) - (S_C - S_T)]."""
    return (profile.omega0 / geometry.c) * (
        (geometry.l_c - geometry.l_t) - (geometry.s_c - geometry.s_t)
    )


def check_regime(
    geometry: PathGeometry,
    detection: DetectionSettings,
    profile: SpectralProfile,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> RegimeReport:
    """Evaluate the asymptotic delay conditions for the given configuration.

    in_regime is true iff both same-pair delays are below threshold (the
    correlated pairs interfere undamped) and both cross-pair delays are
    above it (the uncorrelated pairs are fully suppressed).
    """
    c = geometry.c
    tc_l = effective_detection_time(detection.t_c, geometry.l_c, c)
    tc_s = effective_detection_time(detection.t_c, geometry.s_c, c)
    tt_l = effective_detection_time(detection.t_t, geometry.l_t, c)
    tt_s = effective_detection_time(detection.t_t, geometry.s_t, c)
    dw = profile.delta_omega

    same = (abs(tc_l - tt_l) * dw, abs(tc_s - tt_s) * dw)
    cross = (abs(tc_l - tt_s) * dw, abs(tt_l - tc_s) * dw)
    l_mean = 0.5 * (geometry.l_c + geometry.l_t)
    s_mean = 0.5 * (geometry.s_c + geometry.s_t)
    imbalance = abs(l_mean - s_mean) * dw / c

    ok = all(r <= thresholds.small for r in same) and all(
        r >= thresholds.large for r in cross
    )
    return RegimeReport(
        same_pair_ratios=same,
        cross_pair_ratios=cross,
        path_imbalance_ratio=imbalance,
        theta_small=thresholds.small,
        theta_large=thresholds.large,
        in_regime=ok,
    )
