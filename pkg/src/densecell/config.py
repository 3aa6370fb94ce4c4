"""Run configuration: parsing, validation and content digest."""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import pathloss
from .channel import AntennaScalingLaw, antennas_at
from .errors import ConfigError, DomainError
from .geometry import Window

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

WORKERS_ENV = "DENSECELL_WORKERS"

DEFAULT_DENSITIES = tuple(float(x) for x in np.geomspace(1.0, 1000.0, 8))


@dataclass(frozen=True)
class NetworkConfig:
    """Everything that determines a sweep. ``workers`` does not affect results
    and is excluded from the digest."""

    densities: tuple
    model: pathloss.PathLossModel
    t_laws: tuple
    r_law: AntennaScalingLaw = AntennaScalingLaw.constant(1)
    window: Window = Window.square(10.0)
    noise_db: float = -70.0
    trials: int = 10_000
    master_seed: int = 2020
    mode: str = "miso"
    truncation_eps: float = 1e-3
    exact_points: Optional[int] = 16_384
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "densities", tuple(float(x) for x in self.densities))
        if isinstance(self.t_laws, AntennaScalingLaw):
            object.__setattr__(self, "t_laws", (self.t_laws,))
        object.__setattr__(self, "t_laws", tuple(self.t_laws))
        d = self.densities
        if not d or any(not (x > 0 and math.isfinite(x)) for x in d):
            raise ConfigError("densities must be positive and finite")
        if any(a >= b for a, b in zip(d, d[1:])):
            raise ConfigError("density grid must be strictly increasing")
        if not self.t_laws:
            raise ConfigError("need at least one transmit-antenna law")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.mode not in ("miso", "mimo"):
            raise ConfigError("mode must be 'miso' or 'mimo'")
        if not 0 < self.truncation_eps < 1:
            raise ConfigError("truncation_eps must lie in (0, 1)")
        if self.exact_points is not None and self.exact_points < 1:
            raise ConfigError("exact_points must be positive or null")
        if self.mode == "mimo":
            for law in self.t_laws:
                for lam in d:
                    if antennas_at(self.r_law, lam) > antennas_at(law, lam):
                        raise ConfigError(f"N_r exceeds N_t at lambda={lam:g} for {law.label}")

    @property
    def t_law(self) -> AntennaScalingLaw:
        return self.t_laws[0]

    @property
    def noise(self) -> float:
        return 10.0 ** (self.noise_db / 10.0)

    def n_r_at(self, density) -> int:
        return 1 if self.mode == "miso" else antennas_at(self.r_law, density)

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "network": {
                "densities": list(self.densities),
                "window": self.window.to_dict(),
                "noise_db": self.noise_db,
            },
            "pathloss": pathloss.to_dict(self.model),
            "antennas": {
                "mode": self.mode,
                "t_laws": [law.to_dict() for law in self.t_laws],
                "r_law": self.r_law.to_dict(),
            },
            "simulation": {
                "trials": self.trials,
                "seed": self.master_seed,
                "truncation_eps": self.truncation_eps,
                "exact_points": self.exact_points,
            },
        }


def digest(config: NetworkConfig) -> str:
    """SHA-256 of the canonical JSON form."""
    blob = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _densities(spec):
    if spec is None:
        return DEFAULT_DENSITIES
    if isinstance(spec, dict):
        try:
            lo, hi, n = float(spec["min"]), float(spec["max"]), int(spec["points"])
        except KeyError as exc:
            raise ConfigError(f"density range is missing {exc}") from None
        if n < 1 or not 0 < lo <= hi:
            raise ConfigError("density range needs 0 < min <= max and points >= 1")
        return tuple(float(x) for x in np.geomspace(lo, hi, n))
    return tuple(float(x) for x in spec)


def _window(spec):
    if spec is None:
        return Window.square(10.0)
    try:
        if spec.get("shape") == "disc":
            return Window.disc(spec["radius"])
        if spec.get("shape") == "square":
            return Window.square(spec["half_side"])
    except KeyError as exc:
        raise ConfigError(f"window is missing {exc}") from None
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError("window shape must be 'disc' or 'square'")


def from_dict(doc: dict) -> NetworkConfig:
    """Build a config from the ``network``/``pathloss``/``antennas``/``simulation`` sections."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    unknown = set(doc) - {"network", "pathloss", "antennas", "simulation"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    if "pathloss" not in doc:
        raise ConfigError("config needs a 'pathloss' section")
    net = doc.get("network", {})
    ant = doc.get("antennas", {})
    sim = doc.get("simulation", {})
    model = pathloss.from_dict(doc["pathloss"])

    if "t_laws" in ant:
        t_laws = tuple(AntennaScalingLaw.from_dict(x) for x in ant["t_laws"])
    elif "t_law" in ant:
        t_laws = (AntennaScalingLaw.from_dict(ant["t_law"]),)
    else:
        t_laws = (AntennaScalingLaw.constant(1),)
    r_law = AntennaScalingLaw.from_dict(ant.get("r_law", {"form": "constant", "n": 1}))

    workers = int(os.environ.get(WORKERS_ENV, sim.get("workers", 1)))
    exact = sim.get("exact_points", 16_384)
    try:
        return NetworkConfig(
            densities=_densities(net.get("densities")),
            model=model,
            t_laws=t_laws,
            r_law=r_law,
            window=_window(net.get("window")),
            noise_db=float(net.get("noise_db", -70.0)),
            trials=int(sim.get("trials", 10_000)),
            master_seed=int(sim.get("seed", 2020)),
            mode=ant.get("mode", "miso"),
            truncation_eps=float(sim.get("truncation_eps", 1e-3)),
            exact_points=int(exact) if exact else None,
            workers=max(1, workers),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_document(path) -> dict:
    """Read a TOML or JSON document, chosen by file extension."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(raw.decode())
        return json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None


def load(path) -> NetworkConfig:
    return from_dict(load_document(path))
