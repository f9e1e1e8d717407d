"""Command-line orchestration: sweeps, CNOT table, Bell curves, validation.

Output is CSV (comma separated, ``.`` decimal, header row) with ``#``
footer comments for derived summaries.  Exit codes: 0 success, 1 validation
failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

import numpy as np

from . import analytic, montecarlo
from .analytic import (
    RegimeViolationError,
    ResolutionError,
    fluctuation_correlator,
    g1_polarized,
    g1_quadrature,
    g1_two_path,
    n_order_fluctuation_correlator,
    p_cnot,
    visibility,
)
from .config import (
    ExperimentConfig,
    SweepSpec,
    apply_sweep_value,
    load_config,
    parse_config,
    render_config,
    validate_config,
)
from .model import (
    ConfigurationError,
    DetectionSettings,
    GeometryError,
    PathGeometry,
    PolarizationSettings,
    SpectralProfile,
    check_regime,
    relative_phase,
)
from .network import CNOT_POLARIZATION, N_ORDER, TWO_PATH_SCALAR, NetworkSpec

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


# ---------------------------------------------------------------------------
# Config -> domain objects


def build_profile(config: ExperimentConfig) -> SpectralProfile:
    return SpectralProfile(
        omega0=config.omega0,
        delta_omega=config.delta_omega,
        mean_rate=config.mean_rate,
    )


def build_geometry(config: ExperimentConfig) -> PathGeometry:
    return PathGeometry(
        l_c=config.l_c, s_c=config.s_c, l_t=config.l_t, s_t=config.s_t, c=config.c
    )


def build_detection(config: ExperimentConfig) -> DetectionSettings:
    return DetectionSettings(t_c=config.t_c, t_t=config.t_t)


def build_polarization(config: ExperimentConfig) -> PolarizationSettings:
    return PolarizationSettings(
        phi_c=config.phi_c,
        phi_t=config.phi_t,
        theta_c=config.theta_c,
        theta_t=config.theta_t,
    )


def build_network_spec(config: ExperimentConfig) -> NetworkSpec:
    if config.variant == N_ORDER:
        return NetworkSpec(variant=N_ORDER, channels=config.channels, c=config.c)
    return NetworkSpec(
        variant=config.variant,
        geometry=build_geometry(config),
        phi_c=config.phi_c,
        phi_t=config.phi_t,
    )


def _thetas(config: ExperimentConfig):
    if config.variant == TWO_PATH_SCALAR:
        return None
    if config.variant == N_ORDER:
        return config.thetas
    return (config.theta_c, config.theta_t)


def analytic_correlator(config: ExperimentConfig) -> float:
    geometry = build_geometry(config)
    detection = build_detection(config)
    profile = build_profile(config)
    if config.variant == TWO_PATH_SCALAR:
        return fluctuation_correlator(g1_two_path(geometry, detection, profile))
    if config.variant == CNOT_POLARIZATION:
        return fluctuation_correlator(
            g1_polarized(geometry, detection, profile, build_polarization(config))
        )
    raise ConfigurationError("sweeps support the two-detector variants only")


def quadrature_correlator(config: ExperimentConfig) -> float:
    spec = build_network_spec(config)
    g1 = g1_quadrature(
        spec,
        build_detection(config),
        build_profile(config),
        thetas=_thetas(config),
        spacing=config.grid_spacing,
    )
    return fluctuation_correlator(g1)


def point_seed(seed: int, index: int) -> int:
    """Deterministic per-point seed derived from the root seed."""
    return int(np.random.SeedSequence(entropy=(seed, index)).generate_state(1)[0])


def mc_correlator(config: ExperimentConfig, seed: int) -> montecarlo.EstimatorOutput:
    spec = build_network_spec(config)
    detection = (
        config.times if config.variant == N_ORDER else build_detection(config)
    )
    return montecarlo.estimate_correlator(
        spec,
        detection,
        build_profile(config),
        thetas=_thetas(config),
        trials=config.trials,
        seed=seed,
        batches=config.batches,
        workers=config.workers,
    )


def g2_correlator(config: ExperimentConfig) -> float:
    polarization = (
        build_polarization(config) if config.variant == CNOT_POLARIZATION else None
    )
    return analytic.g2(
        build_network_spec(config),
        build_detection(config),
        build_profile(config),
        polarization,
    )


# ---------------------------------------------------------------------------
# CSV helpers


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header, rows, footers=()):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    for footer in footers:
        lines.append(f"# {footer}")
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _engines(config: ExperimentConfig):
    if config.engine == "all":
        return {"analytic", "quadrature", "mc"}
    return {config.engine}


def _require_seed(config: ExperimentConfig):
    if "mc" in _engines(config) and config.seed is None:
        raise ConfigurationError("--seed is mandatory for Monte Carlo runs")


# ---------------------------------------------------------------------------
# Commands


SWEEP_HEADER = [
    "param",
    "analytic",
    "quadrature",
    "mc_estimate",
    "mc_stderr",
    "g2",
    "regime_ok",
]


def run_sweep(config: ExperimentConfig):
    """Evaluate the configured sweep; returns (header, rows, footers)."""
    if config.sweep is None:
        raise ConfigurationError("sweep command requires a sweep descriptor")
    _require_seed(config)
    engines = _engines(config)
    rows = []
    scans = {"analytic": [], "quadrature": [], "mc": [], "g2": []}
    for index, value in enumerate(config.sweep.points()):
        point = apply_sweep_value(config, config.sweep.name, value)
        row = [float(value)]
        if "analytic" in engines:
            a = analytic_correlator(point)
            scans["analytic"].append(a)
            row.append(a)
        else:
            row.append("")
        if "quadrature" in engines:
            q = quadrature_correlator(point)
            scans["quadrature"].append(q)
            row.append(q)
        else:
            row.append("")
        if "mc" in engines:
            est = mc_correlator(point, point_seed(config.seed, index))
            scans["mc"].append(est.estimate)
            row += [est.estimate, est.stderr]
        else:
            row += ["", ""]
        if "analytic" in engines and config.variant != N_ORDER:
            g2v = g2_correlator(point)
            scans["g2"].append(g2v)
            row.append(g2v)
        else:
            row.append("")
        report = check_regime(
            build_geometry(point), build_detection(point), build_profile(point)
        )
        row.append(report.in_regime)
        rows.append(row)

    footers = []
    for name in ("analytic", "quadrature", "mc", "g2"):
        if scans[name]:
            try:
                footers.append(f"visibility_{name}={visibility(scans[name])!r}")
            except analytic.DegenerateScanError:
                footers.append(f"visibility_{name}=undefined")
    return SWEEP_HEADER, rows, footers


CNOT_HEADER = [
    "prep_c",
    "prep_t",
    "meas_c",
    "meas_t",
    "normalized",
    "p_cnot",
    "truth",
    "deviation",
    "mc_estimate",
    "mc_stderr",
]

_BASIS = {0: 0.0, 1: math.pi / 2.0}


def run_cnot_table(config: ExperimentConfig):
    """Normalized correlations over all computational-basis settings."""
    if config.variant != CNOT_POLARIZATION:
        raise ConfigurationError("cnot-table requires network.variant=cnot_polarization")
    _require_seed(config)
    phi = relative_phase(build_geometry(config), build_profile(config))
    if abs(phi) > 1e-3:
        raise ConfigurationError(
            f"cnot-table requires |relative phase| <= 1e-3, got {phi:g}"
        )
    engines = _engines(config)
    norm = config.mean_rate**2 * analytic.C_NORM_POLARIZED
    rows = []
    index = 0
    for prep_c in (0, 1):
        for prep_t in (0, 1):
            for meas_c in (0, 1):
                for meas_t in (0, 1):
                    point = replace(
                        config,
                        phi_c=_BASIS[prep_c],
                        phi_t=_BASIS[prep_t],
                        theta_c=_BASIS[meas_c],
                        theta_t=_BASIS[meas_t],
                    )
                    value = analytic_correlator(point) / norm
                    probability = p_cnot(build_polarization(point))
                    truth = 1.0 if (meas_c, meas_t) == (prep_c, prep_c ^ prep_t) else 0.0
                    row = [
                        prep_c,
                        prep_t,
                        meas_c,
                        meas_t,
                        value,
                        probability,
                        truth,
                        abs(value - truth),
                    ]
                    if "mc" in engines:
                        est = mc_correlator(point, point_seed(config.seed, index))
                        row += [est.estimate, est.stderr]
                    else:
                        row += ["", ""]
                    rows.append(row)
                    index += 1
    return CNOT_HEADER, rows, []


BELL_HEADER = [
    "theta_c",
    "theta_t",
    "normalized",
    "expected",
    "mc_estimate",
    "mc_stderr",
]


def run_bell_curve(config: ExperimentConfig):
    """Sweep the control analyzer in the Bell configuration phi_c = pi/4, phi_t = 0."""
    if config.variant != CNOT_POLARIZATION:
        config = replace(config, variant=CNOT_POLARIZATION)
    config = replace(config, phi_c=math.pi / 4.0, phi_t=0.0)
    if config.sweep is None:
        config = replace(
            config,
            sweep=SweepSpec("polarization.theta_c", 0.0, 2.0 * math.pi, 36),
        )
    _require_seed(config)
    engines = _engines(config)
    norm = config.mean_rate**2 * analytic.C_NORM_POLARIZED
    rows = []
    for index, value in enumerate(config.sweep.points()):
        point = apply_sweep_value(config, config.sweep.name, value)
        normalized = analytic_correlator(point) / norm
        expected = p_cnot(build_polarization(point))
        row = [point.theta_c, point.theta_t, normalized, expected]
        if "mc" in engines:
            est = mc_correlator(point, point_seed(config.seed, index))
            row += [est.estimate, est.stderr]
        else:
            row += ["", ""]
        rows.append(row)
    return BELL_HEADER, rows, []


N_ORDER_HEADER = ["n", "cycle_sum", "mc_estimate", "mc_stderr", "note"]


def run_n_order(config: ExperimentConfig):
    if config.variant != N_ORDER:
        raise ConfigurationError("n-order requires network.variant=n_order")
    _require_seed(config)
    n = len(config.channels)
    times = config.times or tuple(0.0 for _ in range(n))
    thetas = config.thetas or tuple(0.0 for _ in range(n))
    spec = build_network_spec(config)
    result = n_order_fluctuation_correlator(spec, times, build_profile(config), thetas)
    row = [n, float(result.value)]
    if "mc" in _engines(config):
        est = montecarlo.estimate_correlator(
            spec,
            times,
            build_profile(config),
            thetas=thetas,
            trials=config.trials,
            seed=config.seed,
            batches=config.batches,
            workers=config.workers,
        )
        row += [est.estimate, est.stderr]
    else:
        row += ["", ""]
    row.append(result.note)
    return N_ORDER_HEADER, [row], []


# ---------------------------------------------------------------------------
# Validation


def _closed_form_g1(config: ExperimentConfig) -> complex:
    geometry = build_geometry(config)
    detection = build_detection(config)
    profile = build_profile(config)
    if config.variant == TWO_PATH_SCALAR:
        return g1_two_path(geometry, detection, profile)
    return g1_polarized(geometry, detection, profile, build_polarization(config))


def _quadrature_g1(config: ExperimentConfig) -> complex:
    return g1_quadrature(
        build_network_spec(config),
        build_detection(config),
        build_profile(config),
        thetas=_thetas(config),
        spacing=config.grid_spacing,
    )


def _random_variant(config: ExperimentConfig, rng) -> ExperimentConfig:
    return replace(
        config,
        l_c=float(rng.uniform(0.0, 150.0)),
        s_c=float(rng.uniform(0.0, 150.0)),
        l_t=float(rng.uniform(0.0, 150.0)),
        s_t=float(rng.uniform(0.0, 150.0)),
        t_c=float(rng.uniform(-5.0, 5.0)),
        t_t=float(rng.uniform(-5.0, 5.0)),
        phi_c=float(rng.uniform(0.0, 2.0 * np.pi)),
        phi_t=float(rng.uniform(0.0, 2.0 * np.pi)),
        theta_c=float(rng.uniform(0.0, 2.0 * np.pi)),
        theta_t=float(rng.uniform(0.0, 2.0 * np.pi)),
    )


def validation_checks(config: ExperimentConfig, randomized: int = 20):
    """Run the oracle-equivalence and invariant suite for one configuration.

    Returns a list of (name, tolerance, observed, passed) tuples.
    """
    if config.variant == N_ORDER:
        raise ConfigurationError("validate supports the two-detector variants only")
    checks = []
    r = config.mean_rate

    observed = abs(_quadrature_g1(config) - _closed_form_g1(config)) / r
    checks.append(("oracle_equivalence_config", 1e-6, observed, observed < 1e-6))

    rng = np.random.default_rng(config.seed if config.seed is not None else 0)
    worst = 0.0
    for _ in range(randomized):
        variant = _random_variant(config, rng)
        worst = max(worst, abs(_quadrature_g1(variant) - _closed_form_g1(variant)) / r)
    checks.append(("oracle_equivalence_randomized", 1e-6, worst, worst < 1e-6))

    closed = fluctuation_correlator(_closed_form_g1(config))
    polarization = (
        build_polarization(config) if config.variant == CNOT_POLARIZATION else None
    )
    spec = build_network_spec(config)
    detection = build_detection(config)
    profile = build_profile(config)
    g2v = analytic.g2(spec, detection, profile, polarization)
    background = analytic.g2_background(spec, detection, profile, polarization)
    identity = abs(g2v - background - closed) / max(r**2, 1e-300)
    checks.append(("g2_minus_background_identity", 1e-12, identity, identity < 1e-12))

    report = check_regime(build_geometry(config), detection, profile)
    if report.in_regime:
        fringe = analytic.regime_fringe(
            build_geometry(config), detection, profile, polarization
        )
        deviation = abs(closed - fringe.value) / r**2
        checks.append(("regime_consistency", 1e-3, deviation, deviation < 1e-3))

    if "mc" in _engines(config):
        _require_seed(config)
        est = mc_correlator(config, config.seed)
        z = abs(est.estimate - closed) / max(est.stderr, 1e-300)
        checks.append(("mc_agreement_zscore", 5.0, z, z < 5.0))

    return checks


def run_validate(config: ExperimentConfig) -> int:
    checks = validation_checks(config)
    lines = []
    all_ok = True
    for name, tolerance, observed, passed in checks:
        status = "PASS" if passed else "FAIL"
        all_ok = all_ok and passed
        lines.append(f"{status} {name} tolerance={tolerance:g} observed={observed:.6g}")
    text = "\n".join(lines) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermal-multipath",
        description="Correlation interference of multimode thermal light.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep", "cnot-table", "bell-curve", "n-order", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value configuration file")
        p.add_argument(
            "--engine", choices=("analytic", "quadrature", "mc", "all"), default=None
        )
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--batches", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--sweep", default=None, help="name:start:stop:steps")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        config = load_config(args.config, config)
    overrides = []
    if args.engine is not None:
        overrides.append(f"engine={args.engine}")
    if args.trials is not None:
        overrides.append(f"trials={args.trials}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.batches is not None:
        overrides.append(f"batches={args.batches}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    if args.out is not None:
        overrides.append(f"out={args.out}")
    if args.sweep is not None:
        overrides.append(f"sweep={args.sweep}")
    if overrides:
        config = parse_config("\n".join(overrides), config)
    validate_config(config)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "sweep":
            header, rows, footers = run_sweep(config)
            write_csv(config.out, header, rows, footers)
        elif args.command == "cnot-table":
            header, rows, footers = run_cnot_table(config)
            write_csv(config.out, header, rows, footers)
        elif args.command == "bell-curve":
            header, rows, footers = run_bell_curve(config)
            write_csv(config.out, header, rows, footers)
        elif args.command == "n-order":
            header, rows, footers = run_n_order(config)
            write_csv(config.out, header, rows, footers)
        elif args.command == "validate":
            return run_validate(config)
        return EXIT_OK
    except (ConfigurationError, GeometryError, ResolutionError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeViolationError as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
