"""Run configuration: defaults, file loading and flag overrides.

Config files are flat ``key = value`` text.  Section headers like
``[link]`` are allowed for organisation but carry no namespace; ``#`` and
``;`` start comments.  Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .channel import LinkParams
from .ops import NoiseParams
from .protocol import ProtocolConfig, default_schedule

DEFAULT_SEED = 12345
DEFAULT_TRIALS = 10_000


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters for one CLI invocation.

    Physical defaults follow the replication setup: 20 km segments,
    0.2 dB/km fiber, 0.5% gate and measurement errors, phase errors only,
    three pumping steps, and a 15-segment target.
    """

    l0_km: float = 20.0
    attenuation_db_per_km: float = 0.2
    p_em: float = 0.05
    eps_local: float = 1.0
    t0_s: float = 1e-6
    tc_s: float | None = None
    p: float = 0.995
    eta: float = 0.995
    upsilon: float = 0.0
    m: int = 3
    target_span: int = 15
    f0: float | None = None
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS

    def link_params(self) -> LinkParams:
        return LinkParams(
            l0_km=self.l0_km,
            attenuation_db_per_km=self.attenuation_db_per_km,
            p_em=self.p_em,
            eps_local=self.eps_local,
            t0_s=self.t0_s,
            tc_s=self.tc_s,
        )

    def noise_params(self) -> NoiseParams:
        return NoiseParams(p=self.p, eta=self.eta, upsilon=self.upsilon)

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            link=self.link_params(),
            noise=self.noise_params(),
            m=self.m,
            target_span=self.target_span,
            schedule=default_schedule(self.target_span),
            f0=self.f0,
        )

    def validate(self) -> "RunConfig":
        """Run the underlying parameter validations so errors name the
        offending field; returns self for chaining."""
        self.link_params()
        self.noise_params()
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m!r}")
        default_schedule(self.target_span)
        if self.f0 is not None and not 0.0 <= self.f0 <= 1.0:
            raise ValueError(f"f0 must lie in [0, 1], got {self.f0!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        return self

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {
    "l0_km": float,
    "attenuation_db_per_km": float,
    "p_em": float,
    "eps_local": float,
    "t0_s": float,
    "tc_s": float,
    "p": float,
    "eta": float,
    "upsilon": float,
    "m": int,
    "target_span": int,
    "f0": float,
    "seed": int,
    "trials": int,
}


def parse_config_file(path: str | Path) -> dict:
    """Parse a flat key=value file into typed values.

    Raises ValueError with file/line context for syntax errors, unknown
    keys, duplicates and unparsable values.
    """
    values: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            continue  # organisational section header
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].split(";", 1)[0].strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate config key {key!r}")
        caster = _FIELD_TYPES[key]
        try:
            values[key] = caster(value)
        except ValueError as exc:
            raise ValueError(
                f"{path}:{lineno}: cannot parse {key!r} value {value!r} as {caster.__name__}"
            ) from exc
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Resolve a RunConfig from defaults, an optional file and explicit
    overrides (flags win over file values), then validate."""
    values = parse_config_file(path) if path is not None else {}
    if overrides:
        unknown = set(overrides) - set(_FIELD_TYPES)
        if unknown:
            raise ValueError(f"unknown config overrides: {sorted(unknown)}")
        values.update({k: v for k, v in overrides.items() if v is not None})
    config = replace(RunConfig(), **values)
    return config.validate()


def format_resolved(config: RunConfig) -> str:
    """Stable one-line-per-key rendering used by --print-config and the
    CSV header comments."""
    parts = []
    for key in sorted(config.as_dict()):
        parts.append(f"{key} = {config.as_dict()[key]!r}")
    return "\n".join(parts)
