"""Correlation interference of multimode thermal light.

Simulates and analytically evaluates second- and N-order interference of
correlated optical paths fed by a thermal source: fluctuation-correlation
fringes, the polarization-encoded CNOT table, Bell-type correlation curves,
and their Monte Carlo cross-validation.
"""

from .analytic import (
    CorrelationResult,
    DegenerateScanError,
    FringeScan,
    RegimeViolationError,
    ResolutionError,
    cnot_consistency,
    cycle_sum,
    fluctuation_correlator,
    g1_matrix,
    g1_polarized,
    g1_quadrature,
    g1_two_path,
    g2,
    g2_background,
    gaussian_kernel,
    n_order_fluctuation_correlator,
    p_cnot,
    regime_fringe,
    visibility,
)
from .model import (
    ConfigurationError,
    DetectionSettings,
    GeometryError,
    PathGeometry,
    PolarizationSettings,
    RegimeReport,
    RegimeThresholds,
    SpectralProfile,
    check_regime,
    effective_detection_time,
    mean_photon_number,
    relative_phase,
)
from .montecarlo import (
    EstimationError,
    EstimatorOutput,
    ModeGrid,
    detect,
    estimate_correlator,
    sample_field,
)
from .network import (
    CNOT_POLARIZATION,
    N_ORDER,
    TWO_PATH_SCALAR,
    ChannelSpec,
    NetworkSpec,
    control_block,
    n_order_matrix,
    prep_transformation,
    rotation,
    scalar_two_path_coefficients,
    symmetric_splitter,
    target_block,
    total_matrix,
)

__version__ = "0.1.0"
