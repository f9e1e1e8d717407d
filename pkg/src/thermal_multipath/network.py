"""Frequency-dependent transfer matrices of the interferometer families.

Three families are supported:

* ``two_path_scalar``  -- HBT beam splitter followed by one unbalanced
  Mach-Zehnder per output port, no polarization.
* ``cnot_polarization`` -- balanced splitter + half-wave plates preparing the
  control/target polarizations, followed by the polarization-dependent path
  stages (polarizing MZ on the control side, flip MZ on the target side).
* ``n_order`` -- symmetric 2N-port splitter, one preparation rotation and one
  control- or target-type path stage per channel.

The light enters at a single port (A); only the corresponding block column
of the transfer matrix is physically populated downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ConfigurationError, PathGeometry

TWO_PATH_SCALAR = "two_path_scalar"
CNOT_POLARIZATION = "cnot_polarization"
N_ORDER = "n_order"

VARIANTS = (TWO_PATH_SCALAR, CNOT_POLARIZATION, N_ORDER)

CONTROL = "control"
TARGET = "target"

#: H <-> V flip, a half-wave plate at 45 degrees.
FLIP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

IDENTITY2 = np.eye(2, dtype=complex)

#: Balanced beam splitter acting on the channel (not polarization) index.
BEAM_SPLITTER = np.array([[1j, 1.0], [1.0, 1j]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelSpec:
    """One channel of an N-order network: preparation rotation angle and the
    long/short paths of its control- or target-type stage."""

    phi: float
    kind: str
    long_path: float
    short_path: float

    def __post_init__(self):
        if self.kind not in (CONTROL, TARGET):
            raise ConfigurationError(f"unknown channel kind {self.kind!r}")
        if self.long_path < 0 or self.short_path < 0:
            raise ConfigurationError("channel path lengths must be >= 0")


@dataclass(frozen=True)
class NetworkSpec:
    variant: str
    geometry: PathGeometry | None = None
    phi_c: float = 0.0
    phi_t: float = 0.0
    channels: tuple = field(default_factory=tuple)
    c: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown network variant {self.variant!r}")
        if self.variant in (TWO_PATH_SCALAR, CNOT_POLARIZATION):
            if self.geometry is None:
                raise ConfigurationError(f"{self.variant} requires a geometry")
        if self.variant == N_ORDER:
            if len(self.channels) < 2:
                raise ConfigurationError("n_order requires at least 2 channels")
            if self.c <= 0:
                raise ConfigurationError("propagation speed must be > 0")

    @property
    def n_detectors(self) -> int:
        if self.variant == N_ORDER:
            return len(self.channels)
        return 2

    @property
    def speed(self) -> float:
        if self.geometry is not None:
            return self.geometry.c
        return self.c


def rotation(phi: float) -> np.ndarray:
    """Half-wave-plate rotation in the (H, V) basis.  Its own inverse."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [s, -c]], dtype=complex)


def prep_transformation(phi_c: float, phi_t: float) -> np.ndarray:
    """Balanced beam splitter followed by the two preparation wave plates.

    4x4 unitary on (control H, control V, target H, target V)."""
    plates = np.zeros((4, 4), dtype=complex)
    plates[:2, :2] = rotation(phi_c)
    plates[2:, 2:] = rotation(phi_t)
    return plates @ np.kron(BEAM_SPLITTER, IDENTITY2)


def control_block(geometry: PathGeometry, omega: float) -> np.ndarray:
    """Polarizing MZ on the control side: H takes the short path, V the long."""
    w = omega / geometry.c
    return np.diag(
        [np.exp(1j * w * geometry.s_c), np.exp(1j * w * geometry.l_c)]
    ).astype(complex)


def target_block(geometry: PathGeometry, omega: float) -> np.ndarray:
    """Target MZ: short path leaves polarization alone, long path flips it.

    The two discarded splitter ports make this a contraction, not a unitary.
    """
    w = omega / geometry.c
    return 0.5 * (
        np.exp(1j * w * geometry.l_t) * FLIP + np.exp(1j * w * geometry.s_t) * IDENTITY2
    )


def total_matrix(spec: NetworkSpec, omega: float) -> np.ndarray:
    """Full 4x4 transfer matrix of the polarization-CNOT interferometer."""
    if spec.variant != CNOT_POLARIZATION:
        raise ConfigurationError(
            f"total_matrix requires variant {CNOT_POLARIZATION!r}, got {spec.variant!r}"
        )
    stages = np.zeros((4, 4), dtype=complex)
    stages[:2, :2] = control_block(spec.geometry, omega)
    stages[2:, 2:] = target_block(spec.geometry, omega)
    return stages @ prep_transformation(spec.phi_c, spec.phi_t)


def scalar_two_path_coefficients(geometry: PathGeometry, omega):
    """Detector amplitudes of the scalar two-path network, one per detector.

    Sign and phase conventions follow the field operators at the two HBT
    outputs: the reflected (control) arm carries the extra factor -1 from
    conjugation of the splitter's i, the transmitted (target) arm carries i.
    Accepts scalar or array omega.
    """
    w = np.asarray(omega) / geometry.c
    m_c = -(np.exp(1j * w * geometry.l_c) + np.exp(1j * w * geometry.s_c)) / np.sqrt(2.0)
    m_t = 1j * (np.exp(1j * w * geometry.l_t) + np.exp(1j * w * geometry.s_t)) / np.sqrt(2.0)
    return m_c, m_t


def symmetric_splitter(n: int) -> np.ndarray:
    """Symmetric 2N-port splitter on the channel index.

    Discrete-Fourier matrix for general N; the N = 2 case is the balanced
    beam splitter above so that the two-channel network reduces exactly to
    the CNOT interferometer.
    """
    if n < 2:
        raise ConfigurationError("splitter needs at least 2 channels")
    if n == 2:
        return BEAM_SPLITTER.copy()
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


def _channel_stage(channel: ChannelSpec, omega: float, c: float) -> np.ndarray:
    w = omega / c
    if channel.kind == CONTROL:
        return np.diag(
            [np.exp(1j * w * channel.short_path), np.exp(1j * w * channel.long_path)]
        ).astype(complex)
    return 0.5 * (
        np.exp(1j * w * channel.long_path) * FLIP
        + np.exp(1j * w * channel.short_path) * IDENTITY2
    )


def n_order_matrix(spec: NetworkSpec, omega: float) -> np.ndarray:
    """First block column (input port A) of the N-order network, shape (2N, 2)."""
    if spec.variant != N_ORDER:
        raise ConfigurationError(
            f"n_order_matrix requires variant {N_ORDER!r}, got {spec.variant!r}"
        )
    n = len(spec.channels)
    splitter = symmetric_splitter(n)
    blocks = []
    for i, ch in enumerate(spec.channels):
        stage = _channel_stage(ch, omega, spec.c)
        blocks.append(splitter[i, 0] * stage @ rotation(ch.phi))
    return np.vstack(blocks)


def detector_path_terms(spec: NetworkSpec, thetas=None):
    """Decompose each detector's effective amplitude into path terms.

    Returns one list per detector of (complex coefficient, path length) pairs
    such that the amplitude reaching the analyzer-projected detector is
    sum_j coeff_j * exp(i * omega * length_j / c), with the i prefactor of the
    positive-frequency field already folded in.  This single decomposition
    feeds both the quadrature oracle and the Monte Carlo engine.
    """
    if spec.variant == TWO_PATH_SCALAR:
        g = spec.geometry
        r = 1.0 / np.sqrt(2.0)
        return [
            [(-r, g.l_c), (-r, g.s_c)],
            [(1j * r, g.l_t), (1j * r, g.s_t)],
        ]

    if spec.variant == CNOT_POLARIZATION:
        if thetas is None or len(thetas) != 2:
            raise ConfigurationError("cnot_polarization needs two analyzer angles")
        g = spec.geometry
        channels = (
            ChannelSpec(spec.phi_c, CONTROL, g.l_c, g.s_c),
            ChannelSpec(spec.phi_t, TARGET, g.l_t, g.s_t),
        )
        splitter = BEAM_SPLITTER
    else:
        if thetas is None or len(thetas) != len(spec.channels):
            raise ConfigurationError("n_order needs one analyzer angle per channel")
        channels = spec.channels
        splitter = symmetric_splitter(len(channels))

    terms = []
    for i, (ch, theta) in enumerate(zip(channels, thetas)):
        u = 1j * splitter[i, 0]
        if ch.kind == CONTROL:
            terms.append(
                [
                    (u * np.cos(theta) * np.cos(ch.phi), ch.short_path),
                    (u * np.sin(theta) * np.sin(ch.phi), ch.long_path),
                ]
            )
        else:
            terms.append(
                [
                    (0.5 * u * np.cos(theta - ch.phi), ch.short_path),
                    (0.5 * u * np.sin(theta + ch.phi), ch.long_path),
                ]
            )
    return terms


def detector_amplitudes(spec: NetworkSpec, omegas, thetas=None) -> np.ndarray:
    """Effective detector amplitudes over an array of frequencies.

    Shape (n_detectors, len(omegas)).  Evaluates the path-term decomposition;
    agreement with the explicit matrix composition is covered by tests.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    c = spec.speed
    terms = detector_path_terms(spec, thetas)
    out = np.zeros((len(terms), omegas.size), dtype=complex)
    for d, term_list in enumerate(terms):
        for coeff, length in term_list:
            out[d] += coeff * np.exp(1j * omegas * length / c)
    return out
