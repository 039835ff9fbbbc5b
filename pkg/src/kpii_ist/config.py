"""Experiment configuration: flat ``key = value`` text grouped in sections.

Example::

    [datum]
    profile = gaussian_dxx      # gaussian | gaussian_dx | gaussian_dxx | zero | file
    amplitude = 0.0025
    width = 2.0

    [physical]
    length = 16
    count = 64

    [spectral]
    length = 2.5
    count = 32

    [direct]
    length_1 = 256
    length_2 = 128
    spacing = 0.5
    dt = 0.05
    sponge = 8.0

    [ray]
    a = -3
    t2 = -0.5, 0, 0.5
    times = 10, 20

Unknown sections or keys are rejected so typos surface immediately.
"""

from __future__ import annotations

import configparser
import hashlib
import os
import warnings
from dataclasses import asdict, dataclass, field

from .errors import ConfigError

AMPLITUDE_GUARD = 0.05
PROFILES = ("gaussian", "gaussian_dx", "gaussian_dxx", "zero", "file")


class LargeAmplitudeWarning(UserWarning):
    pass


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentConfig:
    profile: str = "gaussian_dxx"
    amplitude: float = 0.0025
    width: float = 2.0
    datum_path: str = ""
    physical_length: float = 16.0
    physical_count: int = 64
    spectral_length: float = 2.5
    spectral_count: int = 32
    direct_length_1: float = 256.0
    direct_length_2: float = 128.0
    direct_spacing: float = 0.5
    dt: float = 0.05
    sponge: float = 8.0
    a: float = -3.0
    t2: tuple = (-0.5, 0.0, 0.5)
    times: tuple = (10.0, 20.0)
    regime_threshold: float = 1.0
    neumann_tol: float = 1e-10
    second_order_box: float = 64.0
    threads: int = 1
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ConfigError(f"datum.profile must be one of {PROFILES}, got {self.profile!r}")
        if self.profile == "file" and not self.datum_path:
            raise ConfigError("datum.profile = file needs datum.path")
        if not self.times or any(t <= 0 for t in self.times):
            raise ConfigError("ray.times must be a non-empty list of positive values")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigError("ray.times must be strictly increasing")
        for name in ("physical_length", "spectral_length", "direct_length_1", "direct_length_2",
                     "direct_spacing", "dt", "width", "neumann_tol", "second_order_box"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("physical_count", "spectral_count"):
            n = getattr(self, name)
            if n < 4 or n % 2:
                raise ConfigError(f"{name} must be even and >= 4")
        if self.sponge < 0 or self.regime_threshold < 0:
            raise ConfigError("sponge and regime_threshold must be non-negative")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if abs(self.amplitude) > AMPLITUDE_GUARD:
            warnings.warn(f"amplitude {self.amplitude} exceeds the small-data guard {AMPLITUDE_GUARD}",
                          LargeAmplitudeWarning, stacklevel=3)

    def digest(self):
        """Stable hash of every numeric setting (the thread count excluded)."""
        d = asdict(self)
        d.pop("source")
        d.pop("threads")
        text = ";".join(f"{k}={d[k]!r}" for k in sorted(d))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# section -> key -> (field name, parser)
_SCHEMA = {
    "datum": {"profile": ("profile", str), "amplitude": ("amplitude", float), "width": ("width", float),
              "path": ("datum_path", str)},
    "physical": {"length": ("physical_length", float), "count": ("physical_count", int)},
    "spectral": {"length": ("spectral_length", float), "count": ("spectral_count", int)},
    "direct": {"length_1": ("direct_length_1", float), "length_2": ("direct_length_2", float),
               "spacing": ("direct_spacing", float), "dt": ("dt", float), "sponge": ("sponge", float)},
    "ray": {"a": ("a", float), "t2": ("t2", _floats), "times": ("times", _floats),
            "regime_threshold": ("regime_threshold", float)},
    "tolerances": {"neumann": ("neumann_tol", float), "second_order_box": ("second_order_box", float)},
    "run": {"threads": ("threads", int)},
}


def parse_config(text, source="<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key {section}.{key}")
            name, conv = _SCHEMA[section][key]
            try:
                values[name] = conv(raw)
            except ValueError:
                raise ConfigError(f"{source}: cannot parse {section}.{key} = {raw!r}") from None
    return ExperimentConfig(source=source, **values)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def resolve_threads(cli_value=None, config: ExperimentConfig | None = None):
    """Command line first, then KPII_THREADS, then the config file."""
    if cli_value is not None:
        n = int(cli_value)
    elif os.environ.get("KPII_THREADS"):
        try:
            n = int(os.environ["KPII_THREADS"])
        except ValueError:
            raise ConfigError(f"KPII_THREADS={os.environ['KPII_THREADS']!r} is not an integer") from None
    else:
        n = config.threads if config is not None else 1
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n
