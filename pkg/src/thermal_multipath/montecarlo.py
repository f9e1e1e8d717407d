"""Stochastic-field engine.

Thermal light has a positive Glauber-Sudarshan distribution, so every
normally-ordered observable can be computed by sampling classical coherent
amplitudes: one circular complex Gaussian per spectral mode with variance
equal to the mean photon number in that mode.  Each trial propagates a field
sample through the network amplitudes, forms instantaneous intensities at
the detectors, and the correlator of photon-number fluctuations is estimated
from batch means with a deterministic, order-fixed reduction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import DetectionSettings, SpectralProfile, mean_photon_number
from .network import N_ORDER, NetworkSpec, detector_amplitudes, detector_path_terms


class EstimationError(ValueError):
    """Raised when the trial/batch bookkeeping cannot produce an estimate."""


MIN_BATCHES = 16
MIN_TRIALS_PER_BATCH = 100
MIN_MODES = 64


@dataclass(frozen=True)
class ModeGrid:
    """Uniform rotating-frame frequency grid for field sampling."""

    nu: np.ndarray
    spacing: float

    def __post_init__(self):
        if self.nu.size < MIN_MODES:
            raise ValueError(f"mode grid needs >= {MIN_MODES} modes")
        steps = np.diff(self.nu)
        if not np.allclose(steps, self.spacing, rtol=1e-9, atol=0.0):
            raise ValueError("mode grid must be uniformly spaced")

    @property
    def count(self) -> int:
        return int(self.nu.size)

    @classmethod
    def for_configuration(
        cls,
        profile: SpectralProfile,
        tau_max: float = 0.0,
        span: float = 8.0,
        target_count: int = 1024,
    ) -> "ModeGrid":
        """Grid covering +-span spectral widths around the carrier.

        The spacing keeps the first alias of the discrete mode sum (at delay
        2*pi/spacing) at least eight coherence times beyond the largest
        effective delay, where the thermal kernel is numerically zero, so
        the sampled field reproduces the continuum correlations exactly.
        """
        dw = profile.delta_omega
        spacing = 2.0 * span * dw / (target_count - 1)
        alias_limit = np.pi / (tau_max + 8.0 / dw)
        spacing = min(spacing, alias_limit)
        count = max(int(np.ceil(2.0 * span * dw / spacing)) + 1, MIN_MODES)
        nu = np.linspace(-span * dw, span * dw, count)
        return cls(nu=nu, spacing=float(nu[1] - nu[0]))


def sample_field(grid: ModeGrid, profile: SpectralProfile, rng, trials: int = 1):
    """Draw coherent-amplitude samples, shape (trials, modes).

    Per mode: alpha = sqrt(n(nu) * dnu / 2) * (x + i y) with x, y standard
    normal, so <|alpha|^2> equals the mean photon number in the mode.
    """
    sigma = np.sqrt(0.5 * mean_photon_number(profile, profile.omega0 + grid.nu) * grid.spacing)
    draws = rng.standard_normal((trials, grid.count, 2))
    return sigma * (draws[..., 0] + 1j * draws[..., 1])


def _detection_times(spec: NetworkSpec, detection):
    if isinstance(detection, DetectionSettings):
        return (detection.t_c, detection.t_t)
    times = tuple(float(t) for t in detection)
    if len(times) != spec.n_detectors:
        raise ValueError(f"expected {spec.n_detectors} detection times")
    return times


def detection_weights(
    spec: NetworkSpec,
    detection,
    profile: SpectralProfile,
    grid: ModeGrid,
    thetas=None,
) -> np.ndarray:
    """Per-detector mode weights h_d(omega) * exp(-i*omega*t_d), shape (D, K)."""
    omegas = profile.omega0 + grid.nu
    amps = detector_amplitudes(spec, omegas, thetas)
    times = _detection_times(spec, detection)
    phases = np.exp(-1j * np.outer(times, omegas))
    return amps * phases


def detect(sample, spec: NetworkSpec, detection, profile: SpectralProfile,
           grid: ModeGrid, thetas=None):
    """Instantaneous detector intensities for one or more field samples.

    Returns shape (trials, detectors) for a (trials, modes) sample, or a
    1-D array of intensities for a single 1-D sample.
    """
    weights = detection_weights(spec, detection, profile, grid, thetas)
    sample = np.asarray(sample)
    single = sample.ndim == 1
    fields = np.atleast_2d(sample) @ weights.T
    intensities = np.abs(fields) ** 2
    return intensities[0] if single else intensities


def default_grid(spec: NetworkSpec, detection, profile: SpectralProfile, thetas=None) -> ModeGrid:
    times = _detection_times(spec, detection)
    terms = detector_path_terms(spec, thetas)
    c = spec.speed
    eff = [t - length / c for t, tl in zip(times, terms) for _, length in tl]
    return ModeGrid.for_configuration(profile, tau_max=max(eff) - min(eff))


@dataclass(frozen=True)
class EstimatorOutput:
    estimate: float
    stderr: float
    trials: int
    seed: int
    batches: int


def estimate_correlator(
    spec: NetworkSpec,
    detection,
    profile: SpectralProfile,
    thetas=None,
    *,
    trials: int,
    seed: int,
    batches: int = MIN_BATCHES,
    workers: int = 1,
    grid: ModeGrid | None = None,
) -> EstimatorOutput:
    """Estimate the N-detector fluctuation correlator <prod_d (n_d - mean)>.

    The trials are split into batches; each batch draws from its own RNG
    stream keyed by (seed, batch index), subtracts its own sample means, and
    the batch estimates are reduced in batch order.  The result is therefore
    bit-identical for a fixed (seed, trials, batches) regardless of the
    worker count.
    """
    if batches < MIN_BATCHES:
        raise EstimationError(f"need at least {MIN_BATCHES} batches, got {batches}")
    if trials < batches * MIN_TRIALS_PER_BATCH:
        raise EstimationError(
            f"need at least {batches * MIN_TRIALS_PER_BATCH} trials "
            f"for {batches} batches, got {trials}"
        )
    if grid is None:
        grid = default_grid(spec, detection, profile, thetas)
    # Phases are computed in double precision; the trial arithmetic runs in
    # single precision, whose rounding is orders of magnitude below the
    # statistical error at any feasible trial count.
    weights = detection_weights(spec, detection, profile, grid, thetas).astype(
        np.complex64
    )
    sigma = np.sqrt(
        0.5 * mean_photon_number(profile, profile.omega0 + grid.nu) * grid.spacing
    ).astype(np.float32)

    base, extra = divmod(trials, batches)
    sizes = [base + (1 if b < extra else 0) for b in range(batches)]

    def run_batch(index: int) -> float:
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
        draws = rng.standard_normal((sizes[index], grid.count, 2), dtype=np.float32)
        alpha = draws.view(np.complex64)[..., 0]
        alpha *= sigma
        intensities = np.abs(alpha @ weights.T) ** 2
        centered = intensities - intensities.mean(axis=0)
        return float(np.prod(centered, axis=1, dtype=np.float64).mean())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batch_means = np.array(list(pool.map(run_batch, range(batches))))
    else:
        batch_means = np.array([run_batch(b) for b in range(batches)])

    estimate = float(batch_means.mean())
    stderr = float(batch_means.std(ddof=1) / np.sqrt(batches))
    return EstimatorOutput(
        estimate=estimate, stderr=stderr, trials=trials, seed=seed, batches=batches
    )
