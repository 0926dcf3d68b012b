"""Experiment configuration: a single JSON document, validated up front."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .kuranishi.seeds import SEED_KINDS
from .torus.geometry import TorusGeometry

EXPERIMENTS = (
    "verify-identities",
    "quasi-isometry",
    "dbar-inverse",
    "kuranishi",
    "kahler-family",
    "majorant",
    "calibrate",
)

DEFAULT_TOLERANCES: Dict[str, float] = {
    "operator": 1e-10,
    "estimateSlack": 1e-10,
    "fourTerm": 1e-8,
    "isometry": 1e-8,
    "dbarInverse": 1e-10,
    "normalization": 1e-10,
    "integrability": 1e-9,
    "sideCondition": 1e-9,
    "harmonic": 1e-10,
    "twoPath": 1e-9,
    "bracketClosed": 1e-9,
    "holomorphic": 1e-9,
    "cascade": 1e-9,
    "exactness": 1e-9,
    "cohomologyFirst": 1e-10,
    "cohomologyHigher": 1e-9,
    "generatingFunction": 1e-8,
}


class ConfigError(ValueError):
    """The configuration does not parse or violates a precondition."""


@dataclass
class SeedSpec:
    kind: str = "divergence-free-synthetic"
    rngSeed: int = 0
    targetC1Norm: Union[float, str, None] = 0.05
    band: int = 1


@dataclass
class CalibrationSpec:
    sampleCount: int = 200
    rngSeed: int = 0
    maxBand: int = 2
    holdOut: int = 0


@dataclass
class MajorantSpec:
    c: str = "1"
    x1: str = "1"
    N: int = 50
    tau: Optional[str] = None


@dataclass
class ExperimentConfig:
    experiment: str
    geometry: Dict[str, int]
    seed: SeedSpec = field(default_factory=SeedSpec)
    N: int = 6
    m: int = 1
    samples: int = 20
    rngSeed: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    tGrid: List[float] = field(default_factory=lambda: [0.0, 0.5, 0.9])
    calibration: CalibrationSpec = field(default_factory=CalibrationSpec)
    majorant: MajorantSpec = field(default_factory=MajorantSpec)
    identities: Dict[str, Any] = field(default_factory=lambda: {"instances": 50, "baseSeed": 0})
    outDir: Optional[str] = None

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def torus(self) -> TorusGeometry:
        return TorusGeometry(**self.geometry)

    def to_dict(self) -> dict:
        return asdict(self)


def _int(value, name, lo):
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        raise ConfigError(f"{name} must be an integer >= {lo}, got {value!r}")
    return value


def _rational(value, name):
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name} must be a rational number, got {value!r}") from exc


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded JSON document.

    Raises
    ------
    ConfigError
        on unknown keys, wrong types or values outside the preconditions.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    geometry = data.get("geometry", {"n": 2, "K": 4, "oversample": 2})
    if not isinstance(geometry, dict) or set(geometry) - {"n", "K", "oversample"}:
        raise ConfigError("geometry must be an object with keys n, K, oversample")
    try:
        TorusGeometry(**geometry)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid geometry: {exc}") from exc

    def sub(cls, key):
        raw = data.get(key, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"{key} must be an object")
        extra = set(raw) - set(cls.__dataclass_fields__)
        if extra:
            raise ConfigError(f"unknown keys in {key}: {sorted(extra)}")
        return cls(**raw)

    seed = sub(SeedSpec, "seed")
    if seed.kind not in SEED_KINDS or seed.kind == "explicit":
        raise ConfigError(f"seed.kind must be one of {[k for k in SEED_KINDS if k != 'explicit']}")
    _int(seed.rngSeed, "seed.rngSeed", 0)
    _int(seed.band, "seed.band", 1)
    if seed.band > geometry["K"]:
        raise ConfigError("seed.band exceeds the band limit K")
    t = seed.targetC1Norm
    if not (t is None or t == "auto" or (isinstance(t, (int, float)) and not isinstance(t, bool) and t > 0)):
        raise ConfigError("seed.targetC1Norm must be a positive number, \"auto\" or null")
    calibration = sub(CalibrationSpec, "calibration")
    _int(calibration.sampleCount, "calibration.sampleCount", 1)
    _int(calibration.rngSeed, "calibration.rngSeed", 0)
    _int(calibration.maxBand, "calibration.maxBand", 1)
    _int(calibration.holdOut, "calibration.holdOut", 0)
    majorant = sub(MajorantSpec, "majorant")
    if _rational(majorant.c, "majorant.c") <= 0:
        raise ConfigError("majorant.c must be positive")
    _rational(majorant.x1, "majorant.x1")
    if majorant.tau is not None:
        _rational(majorant.tau, "majorant.tau")
    _int(majorant.N, "majorant.N", 1)
    cfg = ExperimentConfig(
        experiment=exp,
        geometry=dict(geometry),
        seed=seed,
        N=_int(data.get("N", 6), "N", 1),
        m=_int(data.get("m", 1), "m", 1),
        samples=_int(data.get("samples", 20), "samples", 1),
        rngSeed=_int(data.get("rngSeed", 0), "rngSeed", 0),
        tolerances=dict(data.get("tolerances", {})),
        tGrid=list(data.get("tGrid", [0.0, 0.5, 0.9])),
        calibration=calibration,
        majorant=majorant,
        identities=dict(data.get("identities", {"instances": 50, "baseSeed": 0})),
        outDir=data.get("outDir"),
    )
    for name, value in cfg.tolerances.items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {name!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
            raise ConfigError(f"tolerance {name} must be a non-negative number")
    for t in cfg.tGrid:
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not 0 <= t < 1:
            raise ConfigError("tGrid entries must lie in [0, 1)")
    ident = cfg.identities
    if set(ident) - {"instances", "baseSeed", "tags"}:
        raise ConfigError("identities accepts instances, baseSeed, tags")
    _int(ident.get("instances", 50), "identities.instances", 1)
    _int(ident.get("baseSeed", 0), "identities.baseSeed", 0)
    return cfg


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    return parse_config(data)
