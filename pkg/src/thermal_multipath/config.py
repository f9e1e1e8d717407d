"""Line-oriented experiment configuration.

Grammar: one ``key=value`` pair per line, ``#`` starts a comment, blank
lines ignored.  Keys are dotted section names (``geometry.l_c``), values are
numbers or plain strings.  The same keys are accepted as CLI overrides.

For N-order networks the channel list is a comma-separated sequence of
``kind:phi:long:short`` descriptors, detection times and analyzer angles are
comma-separated number lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .model import ConfigurationError
from .network import CNOT_POLARIZATION, N_ORDER, TWO_PATH_SCALAR, ChannelSpec

ENGINES = ("analytic", "quadrature", "mc", "all")


@dataclass(frozen=True)
class SweepSpec:
    name: str
    start: float
    stop: float
    steps: int

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigurationError(f"sweep must be name:start:stop:steps, got {text!r}")
        name, start, stop, steps = parts
        try:
            spec = cls(name=name, start=float(start), stop=float(stop), steps=int(steps))
        except ValueError as exc:
            raise ConfigurationError(f"bad sweep descriptor {text!r}: {exc}") from exc
        if spec.steps < 2:
            raise ConfigurationError("sweep needs at least 2 steps")
        return spec

    def render(self) -> str:
        return f"{self.name}:{self.start!r}:{self.stop!r}:{self.steps}"

    def points(self):
        step = (self.stop - self.start) / self.steps
        return [self.start + i * step for i in range(self.steps)]


@dataclass(frozen=True)
class ExperimentConfig:
    variant: str = TWO_PATH_SCALAR
    l_c: float = 100.0
    s_c: float = 0.0
    l_t: float = 100.0
    s_t: float = 0.0
    c: float = 1.0
    omega0: float = 1000.0
    delta_omega: float = 1.0
    mean_rate: float = 1.0
    t_c: float = 0.0
    t_t: float = 0.0
    phi_c: float = 0.0
    phi_t: float = 0.0
    theta_c: float = 0.0
    theta_t: float = 0.0
    engine: str = "analytic"
    trials: int = 100_000
    seed: int | None = None
    batches: int = 16
    workers: int = 1
    sweep: SweepSpec | None = None
    out: str = ""
    grid_span: float = 8.0
    grid_spacing: float | None = None
    channels: tuple = field(default_factory=tuple)
    times: tuple = field(default_factory=tuple)
    thetas: tuple = field(default_factory=tuple)


_KEYMAP = {
    "network.variant": ("variant", str),
    "geometry.l_c": ("l_c", float),
    "geometry.s_c": ("s_c", float),
    "geometry.l_t": ("l_t", float),
    "geometry.s_t": ("s_t", float),
    "geometry.c": ("c", float),
    "spectrum.omega0": ("omega0", float),
    "spectrum.delta_omega": ("delta_omega", float),
    "spectrum.mean_rate": ("mean_rate", float),
    "detection.t_c": ("t_c", float),
    "detection.t_t": ("t_t", float),
    "polarization.phi_c": ("phi_c", float),
    "polarization.phi_t": ("phi_t", float),
    "polarization.theta_c": ("theta_c", float),
    "polarization.theta_t": ("theta_t", float),
    "engine": ("engine", str),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "batches": ("batches", int),
    "workers": ("workers", int),
    "sweep": ("sweep", SweepSpec.parse),
    "out": ("out", str),
    "grid.span": ("grid_span", float),
    "grid.spacing": ("grid_spacing", float),
    "norder.channels": ("channels", "channels"),
    "norder.times": ("times", "floats"),
    "norder.thetas": ("thetas", "floats"),
}

_FIELD_TO_KEY = {f: k for k, (f, _) in _KEYMAP.items()}


def _parse_channels(text: str) -> tuple:
    channels = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 4:
            raise ConfigurationError(
                f"channel must be kind:phi:long:short, got {chunk!r}"
            )
        kind, phi, long_path, short_path = parts
        channels.append(
            ChannelSpec(
                phi=float(phi),
                kind=kind,
                long_path=float(long_path),
                short_path=float(short_path),
            )
        )
    return tuple(channels)


def _parse_floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(","))


def _convert(key: str, raw: str):
    if key not in _KEYMAP:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    name, conv = _KEYMAP[key]
    try:
        if conv == "channels":
            return name, _parse_channels(raw)
        if conv == "floats":
            return name, _parse_floats(raw)
        return name, conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(f"bad value for {key}: {raw!r} ({exc})") from exc


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    config = base or ExperimentConfig()
    updates = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        name, value = _convert(key, raw)
        updates[name] = value
    config = replace(config, **updates)
    validate_config(config)
    return config


def load_config(path: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read(), base)


def render_config(config: ExperimentConfig) -> str:
    """Serialize to the key=value format; parse(render(c)) == c."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        key = _FIELD_TO_KEY[f.name]
        if value is None:
            continue
        if isinstance(value, SweepSpec):
            rendered = value.render()
        elif f.name == "channels":
            if not value:
                continue
            rendered = ",".join(
                f"{ch.kind}:{ch.phi!r}:{ch.long_path!r}:{ch.short_path!r}" for ch in value
            )
        elif f.name in ("times", "thetas"):
            if not value:
                continue
            rendered = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        if f.name == "out" and not value:
            continue
        lines.append(f"{key}={rendered}")
    return "\n".join(lines) + "\n"


def validate_config(config: ExperimentConfig):
    if config.variant not in (TWO_PATH_SCALAR, CNOT_POLARIZATION, N_ORDER):
        raise ConfigurationError(f"unknown network variant {config.variant!r}")
    if config.engine not in ENGINES:
        raise ConfigurationError(f"unknown engine {config.engine!r}")
    if config.trials <= 0 or config.batches <= 0 or config.workers <= 0:
        raise ConfigurationError("trials, batches and workers must be positive")
    if config.delta_omega <= 0 or config.mean_rate <= 0 or config.omega0 < 0:
        raise ConfigurationError("invalid spectral parameters")
    if config.c <= 0:
        raise ConfigurationError("propagation speed must be positive")
    if config.variant == N_ORDER:
        if len(config.channels) < 2:
            raise ConfigurationError("n_order requires at least 2 channels")
        n = len(config.channels)
        if config.times and len(config.times) != n:
            raise ConfigurationError("norder.times length must match channel count")
        if config.thetas and len(config.thetas) != n:
            raise ConfigurationError("norder.thetas length must match channel count")
    if config.sweep is not None and config.sweep.name not in sweepable_parameters(config):
        raise ConfigurationError(f"unknown sweep parameter {config.sweep.name!r}")


def sweepable_parameters(config: ExperimentConfig):
    names = [
        "phase",
        "geometry.l_c",
        "geometry.s_c",
        "geometry.l_t",
        "geometry.s_t",
        "detection.t_c",
        "detection.t_t",
    ]
    if config.variant == CNOT_POLARIZATION:
        names += [
            "polarization.phi_c",
            "polarization.phi_t",
            "polarization.theta_c",
            "polarization.theta_t",
        ]
    return names


def apply_sweep_value(config: ExperimentConfig, name: str, value: float) -> ExperimentConfig:
    """Return a copy of the config with one swept parameter applied.

    ``phase`` sets the fringe phase directly by stretching the control long
    arm: l_c = base l_c + value * c / omega0.
    """
    if name == "phase":
        if config.omega0 <= 0:
            raise ConfigurationError("phase sweep requires omega0 > 0")
        return replace(config, l_c=config.l_c + value * config.c / config.omega0)
    if name in _KEYMAP:
        attr, conv = _KEYMAP[name]
        if conv is float:
            return replace(config, **{attr: value})
    raise ConfigurationError(f"cannot sweep parameter {name!r}")
