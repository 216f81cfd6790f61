"""
Configuration management for satpart.

Values are layered: dataclass defaults < key=value config file < environment < command-line flags.
The config file grammar is one ``key=value`` per line with ``#`` comments; keys are RunConfig
field names, case-insensitive. Only the worker count (plus the monitoring variables) is read
from the environment.
"""
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union, get_args, get_type_hints

from dotenv import dotenv_values

from satpart.encoders.ciphers import Cipher
from satpart.estimator.exact import DEFAULT_ENUMERATION_CAP
from satpart.estimator.observation import METRIC_ALIASES
from satpart.estimator.predictive import CONVENTIONS
from satpart.optimizer.annealing import COOLING_MODES
from satpart.solver.outcome import METRICS
from satpart.utils.exceptions import ConfigurationError, EncodingError

ENV_OVERRIDES = {
    "SATPART_WORKERS": "workers",
    "SENTRY_DSN": "sentry_dsn",
    "ENVIRONMENT": "environment",
    "SATPART_LOG_LEVEL": "log_level",
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    """Parameters of every satpart command."""

    # Instances
    cipher: str = "bivium"
    keystream_len: Optional[int] = None
    weaken_k: int = 0
    extend_weakening: bool = False

    # Estimation
    sample_size: int = 1000
    seed: int = 0
    gamma: float = 0.95
    ci_convention: str = "one_sided"
    metric: str = "conflicts"
    max_conflicts: Optional[int] = None
    max_wall_seconds: Optional[float] = None

    # Search
    algorithm: str = "tabu"
    t0: Optional[float] = None
    q_mult: float = 0.98
    t_inf: Optional[float] = None
    cooling: str = "per_evaluation"
    radius: int = 1
    max_evaluations: Optional[int] = None
    max_search_seconds: Optional[float] = None

    # Orchestration
    workers: int = 1
    max_retries: int = 2
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    stop_on_sat: bool = True

    # Monitoring
    log_level: str = "WARNING"
    environment: str = "production"
    sentry_dsn: Optional[str] = None

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def coerce(cls, name: str, raw: Any) -> Any:
        """Convert a textual value to the declared type of field `name`."""
        hints = get_type_hints(cls)
        if name not in hints:
            raise ConfigurationError(f"unknown configuration key {name!r}")
        if not isinstance(raw, str):
            return raw
        target = hints[name]
        optional = type(None) in get_args(target)
        if optional:
            target = next(arg for arg in get_args(target) if arg is not type(None))
            if raw.strip().lower() in ("", "none", "null"):
                return None
        text = raw.strip()
        try:
            if target is bool:
                if text.lower() in _TRUE:
                    return True
                if text.lower() in _FALSE:
                    return False
                raise ValueError(text)
            if target is int:
                return int(text, 0)
            if target is float:
                return float(text)
        except ValueError:
            raise ConfigurationError(f"invalid value {raw!r} for {name}") from None
        return text

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any], base: Optional["RunConfig"] = None) -> "RunConfig":
        """Overlay `values` (None entries skipped) on base or the defaults."""
        config = base or cls()
        updates: Dict[str, Any] = {}
        for key, raw in values.items():
            if raw is None:
                continue
            name = key.strip().lower().replace("-", "_")
            updates[name] = cls.coerce(name, raw)
        return replace(config, **updates)

    @classmethod
    def from_file(cls, path: Union[str, Path], base: Optional["RunConfig"] = None) -> "RunConfig":
        if not Path(path).is_file():
            raise ConfigurationError(f"config file {path} does not exist")
        return cls.from_mapping(dotenv_values(path), base)

    @classmethod
    def from_env(cls, base: Optional["RunConfig"] = None, environ: Optional[Mapping[str, str]] = None) -> "RunConfig":
        environ = os.environ if environ is None else environ
        values = {field_name: environ[var] for var, field_name in ENV_OVERRIDES.items() if environ.get(var)}
        return cls.from_mapping(values, base)

    @classmethod
    def load(cls, config_path: Optional[Union[str, Path]] = None, flags: Optional[Mapping[str, Any]] = None) -> "RunConfig":
        """Build the effective configuration from every layer and validate it."""
        config = cls()
        if config_path:
            config = cls.from_file(config_path, config)
        config = cls.from_env(config)
        if flags:
            config = cls.from_mapping(flags, config)
        config.validate()
        return config

    def validate(self) -> None:
        """Validate value ranges; raises ConfigurationError."""
        if not 0.0 < self.gamma < 1.0:
            raise ConfigurationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0.0 < self.q_mult < 1.0:
            raise ConfigurationError(f"q_mult must lie in (0, 1), got {self.q_mult}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}")
        if self.sample_size < 1:
            raise ConfigurationError(f"sample_size must be at least 1, got {self.sample_size}")
        if self.radius < 1:
            raise ConfigurationError(f"radius must be at least 1, got {self.radius}")
        if self.max_retries < 0:
            raise ConfigurationError("max_retries must not be negative")
        if self.weaken_k < 0:
            raise ConfigurationError("weaken_k must not be negative")
        if self.enumeration_cap < 0:
            raise ConfigurationError("enumeration_cap must not be negative")
        if self.t0 is not None and self.t0 <= 0:
            raise ConfigurationError("t0 must be positive")
        if self.t_inf is not None and self.t_inf <= 0:
            raise ConfigurationError("t_inf must be positive")
        if self.t0 is not None and self.t_inf is not None and self.t_inf >= self.t0:
            raise ConfigurationError("t_inf must be below t0")
        if self.metric not in METRICS and self.metric not in METRIC_ALIASES:
            raise ConfigurationError(f"unknown metric {self.metric!r}")
        if self.cooling not in COOLING_MODES:
            raise ConfigurationError(f"unknown cooling mode {self.cooling!r}")
        if self.ci_convention not in CONVENTIONS:
            raise ConfigurationError(f"unknown CI convention {self.ci_convention!r}")
        if self.algorithm not in ("annealing", "tabu"):
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        try:
            Cipher.parse(self.cipher)
        except EncodingError as e:
            raise ConfigurationError(str(e)) from None

    def to_dict(self) -> Dict[str, Any]:
        data = {name: getattr(self, name) for name in self.field_names()}
        data.pop("sentry_dsn")
        return data
