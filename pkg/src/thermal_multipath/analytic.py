"""Closed-form and quadrature evaluation of the correlation quantities.

The central object is the first-order correlation function G1 between the
two detectors.  The measured product of photon-number fluctuations is
|G1|^2; the second-order correlation adds the constant intensity background.
Closed forms follow from the thermal trace property, which turns every
frequency integral into the Gaussian kernel

    kernel(t1, t2) = mean_rate * exp(i*omega0*(t1-t2)) * exp(-(t1-t2)^2 * dw^2 / 2)

evaluated at effective detection times t_d - l_d/c.  The quadrature engine
integrates the spectral density against the network transfer amplitudes
instead and serves as an independent oracle, valid with no regime assumption.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    DetectionSettings,
    PathGeometry,
    PolarizationSettings,
    RegimeReport,
    RegimeThresholds,
    SpectralProfile,
    check_regime,
    mean_photon_number,
    relative_phase,
)
from .network import (
    CNOT_POLARIZATION,
    N_ORDER,
    TWO_PATH_SCALAR,
    NetworkSpec,
    detector_amplitudes,
    detector_path_terms,
)

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
REGIME_APPROX = "regime_approx"

#: Overall detector response constant; fixed to 1 so every
#: proportionality in the fringe formulas becomes an equality.
K_DETECTOR = 1.0

#: a = K^2 / 2, the per-term amplitude of the scalar four-term sum.
A_SCALAR = 0.5 * K_DETECTOR**2

#: Normalization of the polarized fringe, (K^2/4)^2 with K = 1.
C_NORM_POLARIZED = 1.0 / 16.0

MAX_CYCLE_ORDER = 8


class RegimeViolationError(RuntimeError):
    """Raised when a regime-only formula is used out of regime."""

    def __init__(self, report: RegimeReport):
        super().__init__(
            "configuration violates the delay-regime conditions: "
            f"same-pair ratios {report.same_pair_ratios}, "
            f"cross-pair ratios {report.cross_pair_ratios}"
        )
        self.report = report


class ResolutionError(ValueError):
    """Raised when a quadrature grid is too coarse for the configuration."""


class DegenerateScanError(ValueError):
    """Raised when visibility is requested for an all-zero scan."""


@dataclass(frozen=True)
class CorrelationResult:
    value: complex
    method: str
    stat_error: float = 0.0
    regime: RegimeReport | None = None
    note: str = ""


@dataclass
class FringeScan:
    """Ordered (scan parameter, value) samples of a fringe."""

    parameters: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def append(self, parameter: float, value: float):
        self.parameters.append(parameter)
        self.values.append(value)

    @property
    def visibility(self) -> float:
        return visibility(self.values)


def gaussian_kernel(profile: SpectralProfile, t1, t2):
    """Thermal two-time kernel; r_bar at zero delay, conjugate-symmetric."""
    tau = np.asarray(t1) - np.asarray(t2)
    dw = profile.delta_omega
    return profile.mean_rate * np.exp(1j * profile.omega0 * tau - 0.5 * (tau * dw) ** 2)


def g1_two_path(
    geometry: PathGeometry,
    detection: DetectionSettings,
    profile: SpectralProfile,
) -> complex:
    """Scalar G1(t_C, t_T): the four-term sum over path pairs.

    Each of the pairs (L_C,L_T), (S_C,S_T), (L_C,S_T), (S_C,L_T) contributes
    -i/2 times the thermal kernel at its effective detection times.
    """
    c = geometry.c
    total = 0.0 + 0.0j
    for l_c in (geometry.l_c, geometry.s_c):
        for l_t in (geometry.l_t, geometry.s_t):
            total += gaussian_kernel(
                profile, detection.t_c - l_c / c, detection.t_t - l_t / c
            )
    return -1j * A_SCALAR * total


def g1_polarized(
    geometry: PathGeometry,
    detection: DetectionSettings,
    profile: SpectralProfile,
    polarization: PolarizationSettings,
) -> complex:
    """Polarization-resolved G1(t_C, t_T) of the CNOT interferometer.

    Exact four-term expression: each path pair carries a trigonometric
    weight from the preparation and analyzer angles times the thermal
    kernel at its effective detection times.
    """
    c = geometry.c
    p = polarization
    kappa = lambda l_c, l_t: gaussian_kernel(
        profile, detection.t_c - l_c / c, detection.t_t - l_t / c
    ) / profile.mean_rate

    cos_c = math.cos(p.theta_c) * math.cos(p.phi_c)
    sin_c = math.sin(p.theta_c) * math.sin(p.phi_c)
    cos_t = math.cos(p.theta_t - p.phi_t)
    sin_t = math.sin(p.theta_t + p.phi_t)

    total = (
        cos_c * cos_t * kappa(geometry.s_c, geometry.s_t)
        + cos_c * sin_t * kappa(geometry.s_c, geometry.l_t)
        + sin_c * cos_t * kappa(geometry.l_c, geometry.s_t)
        + sin_c * sin_t * kappa(geometry.l_c, geometry.l_t)
    )
    return -0.25j * K_DETECTOR**2 * profile.mean_rate * total


def g1_from_terms(terms_1, t1, terms_2, t2, profile: SpectralProfile, c: float) -> complex:
    """Closed-form G1 between two detectors given their path-term
    decompositions (see network.detector_path_terms)."""
    total = 0.0 + 0.0j
    for coeff_1, len_1 in terms_1:
        for coeff_2, len_2 in terms_2:
            total += (
                np.conj(coeff_1)
                * coeff_2
                * gaussian_kernel(profile, t1 - len_1 / c, t2 - len_2 / c)
            )
    return complex(total)


def _max_effective_delay(spec: NetworkSpec, times, thetas) -> float:
    terms = detector_path_terms(spec, thetas)
    c = spec.speed
    eff = [
        t - length / c
        for t, term_list in zip(times, terms)
        for _, length in term_list
    ]
    return max(eff) - min(eff)


def spectral_grid(
    profile: SpectralProfile,
    tau_max: float,
    span: float = 8.0,
    spacing: float | None = None,
):
    """Uniform rotating-frame frequency grid resolving the spectrum.

    Spacing rule: fine enough for both the Gaussian envelope (dw/20) and the
    fastest fringe exp(i*nu*tau_max) (one twentieth of its period).  An
    explicit coarser spacing is refused.
    """
    dw = profile.delta_omega
    limit = dw / 20.0
    if tau_max > 0:
        limit = min(limit, 2.0 * np.pi / (20.0 * tau_max))
    if spacing is None:
        spacing = limit
    elif spacing > limit * (1.0 + 1e-12):
        raise ResolutionError(
            f"grid spacing {spacing:g} too coarse; need <= {limit:g} "
            f"for tau_max = {tau_max:g}"
        )
    count = max(int(np.ceil(2.0 * span * dw / spacing)) + 1, 64)
    return np.linspace(-span * dw, span * dw, count)


def g1_quadrature(
    spec: NetworkSpec,
    detection,
    profile: SpectralProfile,
    thetas=None,
    grid=None,
    spacing: float | None = None,
    detectors=(0, 1),
) -> complex:
    """G1 between two detectors by direct spectral integration.

    Integrates n(omega) * conj(h_i(omega)) * h_j(omega) * exp(i*omega*(t_i-t_j))
    over the source spectrum with the trapezoidal rule, where h_d are the
    detector transfer amplitudes.  Independent of any regime assumption.
    """
    times = _detection_times(spec, detection)
    if grid is None:
        tau_max = _max_effective_delay(spec, times, thetas)
        grid = spectral_grid(profile, tau_max, spacing=spacing)
    omegas = profile.omega0 + np.asarray(grid)
    amps = detector_amplitudes(spec, omegas, thetas)
    i, j = detectors
    weight = mean_photon_number(profile, omegas)
    integrand = (
        weight
        * np.conj(amps[i])
        * amps[j]
        * np.exp(1j * omegas * (times[i] - times[j]))
    )
    return complex(np.trapezoid(integrand, omegas))


def _detection_times(spec: NetworkSpec, detection):
    if isinstance(detection, DetectionSettings):
        if spec.variant == N_ORDER and spec.n_detectors != 2:
            raise ValueError("n_order networks need one detection time per channel")
        return (detection.t_c, detection.t_t)
    times = tuple(float(t) for t in detection)
    if len(times) != spec.n_detectors:
        raise ValueError(
            f"expected {spec.n_detectors} detection times, got {len(times)}"
        )
    return times


def fluctuation_correlator(g1: complex) -> float:
    """|G1|^2, the measured product of photon-number fluctuations."""
    return float(abs(g1) ** 2)


def g2(
    spec: NetworkSpec,
    detection: DetectionSettings,
    profile: SpectralProfile,
    polarization: PolarizationSettings | None = None,
) -> float:
    """Second-order correlation: intensity background plus |G1|^2."""
    thetas = _thetas(spec, polarization)
    terms = detector_path_terms(spec, thetas)
    c = spec.speed
    g_cc = g1_from_terms(terms[0], detection.t_c, terms[0], detection.t_c, profile, c)
    g_tt = g1_from_terms(terms[1], detection.t_t, terms[1], detection.t_t, profile, c)
    g_ct = g1_from_terms(terms[0], detection.t_c, terms[1], detection.t_t, profile, c)
    return float((g_cc * g_tt).real + abs(g_ct) ** 2)


def g2_background(
    spec: NetworkSpec,
    detection: DetectionSettings,
    profile: SpectralProfile,
    polarization: PolarizationSettings | None = None,
) -> float:
    """The constant product of mean intensities at the two detectors."""
    thetas = _thetas(spec, polarization)
    terms = detector_path_terms(spec, thetas)
    c = spec.speed
    g_cc = g1_from_terms(terms[0], detection.t_c, terms[0], detection.t_c, profile, c)
    g_tt = g1_from_terms(terms[1], detection.t_t, terms[1], detection.t_t, profile, c)
    return float((g_cc * g_tt).real)


def _thetas(spec: NetworkSpec, polarization):
    if spec.variant == TWO_PATH_SCALAR:
        return None
    if polarization is None:
        raise ValueError(f"{spec.variant} requires polarization settings")
    return (polarization.theta_c, polarization.theta_t)


def regime_fringe(
    geometry: PathGeometry,
    detection: DetectionSettings,
    profile: SpectralProfile,
    polarization: PolarizationSettings | None = None,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> CorrelationResult:
    """In-regime fluctuation correlator: only the correlated pairs survive.

    Scalar: 2 a^2 r^2 (1 + cos phi).  Polarized: the CNOT fringe with the
    relative phase attached to the long-long term.  Raises out of regime.
    """
    report = check_regime(geometry, detection, profile, thresholds)
    if not report.in_regime:
        raise RegimeViolationError(report)
    phi = relative_phase(geometry, profile)
    r = profile.mean_rate
    if polarization is None:
        value = 2.0 * A_SCALAR**2 * r**2 * (1.0 + math.cos(phi))
    else:
        p = polarization
        amp = math.cos(p.phi_c) * math.cos(p.theta_c) * math.cos(
            p.phi_t - p.theta_t
        ) + np.exp(1j * phi) * math.sin(p.phi_c) * math.sin(p.theta_c) * math.sin(
            p.phi_t + p.theta_t
        )
        value = r**2 * C_NORM_POLARIZED * abs(amp) ** 2
    return CorrelationResult(value=float(value), method=REGIME_APPROX, regime=report)


def p_cnot(polarization: PolarizationSettings) -> float:
    """Outcome probability of the simulated CNOT at the given angles."""
    p = polarization
    amp = math.cos(p.phi_c) * math.cos(p.theta_c) * math.cos(
        p.phi_t - p.theta_t
    ) + math.sin(p.phi_c) * math.sin(p.theta_c) * math.sin(p.phi_t + p.theta_t)
    return float(amp**2)


def cnot_consistency(
    polarization: PolarizationSettings,
    geometry: PathGeometry,
    profile: SpectralProfile,
    detection: DetectionSettings = DetectionSettings(),
    thresholds: RegimeThresholds = RegimeThresholds(),
    eps: float = 1e-6,
) -> float:
    """Relative deviation between the normalized fringe and the CNOT probability.

    Requires in-regime geometry with negligible relative phase.
    """
    result = regime_fringe(geometry, detection, profile, polarization, thresholds)
    normalized = result.value / (profile.mean_rate**2 * C_NORM_POLARIZED)
    target = p_cnot(polarization)
    return float(abs(normalized - target) / max(target, eps))


def visibility(values) -> float:
    """(max - min) / (max + min) of a fringe scan."""
    values = [float(v) for v in values]
    if not values:
        raise DegenerateScanError("empty scan")
    hi, lo = max(values), min(values)
    if hi + lo <= 0:
        raise DegenerateScanError("scan maximum + minimum is not positive")
    return (hi - lo) / (hi + lo)


def g1_matrix(
    spec: NetworkSpec,
    times,
    profile: SpectralProfile,
    thetas=None,
) -> np.ndarray:
    """Hermitian matrix of closed-form G1(t_i, t_j) over all detector pairs."""
    terms = detector_path_terms(spec, thetas)
    c = spec.speed
    n = len(terms)
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i, j] = g1_from_terms(terms[i], times[i], terms[j], times[j], profile, c)
    return out


def n_order_fluctuation_correlator(
    spec: NetworkSpec,
    times,
    profile: SpectralProfile,
    thetas=None,
) -> CorrelationResult:
    """N-detector fluctuation correlator as a sum over full cycles.

    Sum over single-N-cycle permutations sigma of prod_i G1(t_i, t_sigma(i)).
    For N = 2 this is exactly |G1|^2.  For N > 2 it is the joint cumulant of
    the detector intensities under Gaussian field statistics: an extension
    beyond the second-order closed forms, flagged in the result note.  For
    N >= 4 the raw centered product also contains disconnected pair terms
    not included here.
    """
    times = _detection_times(spec, times)
    n = len(times)
    if n > MAX_CYCLE_ORDER:
        raise ValueError(f"cycle sum limited to N <= {MAX_CYCLE_ORDER}, got {n}")
    g = g1_matrix(spec, times, profile, thetas)
    note = "" if n == 2 else "derived extension beyond pairwise order"
    return CorrelationResult(value=cycle_sum(g), method=CLOSED_FORM, note=note)


def cycle_sum(g: np.ndarray) -> float:
    """Real part of the sum over full-cycle permutations of prod_i g[i, sigma(i)]."""
    n = g.shape[0]
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        if not _is_full_cycle(perm):
            continue
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= g[i, j]
        total += prod
    return float(total.real)


def _is_full_cycle(perm) -> bool:
    seen = 1
    j = perm[0]
    while j != 0:
        j = perm[j]
        seen += 1
    return seen == len(perm)
