"""Conditional SINR and area spectral efficiency of one realization."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import ChannelDraw
from .errors import DegenerateDenominatorError, DomainError
from .geometry import NetworkRealization, serving_distance
from .pathloss import PathLossModel


@dataclass(frozen=True)
class TrialResult:
    r0: float
    serving_gain: float
    interference: float
    noise: float
    sinr: float
    ase: float
    normalized_sinr: float
    n_t: int
    n_r: int
    density: float

    def to_dict(self):
        return asdict(self)


def noise_power(noise_db: float) -> float:
    """Linear noise power relative to unit transmit power."""
    return 10.0 ** (noise_db / 10.0)


def interference_sum(model: PathLossModel, distances, gains) -> float:
    """``sum L(r_i) g_i`` in the given (nearest-first) order, exactly rounded."""
    terms = model.gain(np.asarray(distances, dtype=float)) * np.asarray(gains, dtype=float)
    return math.fsum(terms)


def sinr_from_terms(signal: float, interference: float, noise: float) -> float:
    denom = interference + noise
    if denom == 0:
        raise DegenerateDenominatorError("no interferers and zero noise")
    return signal / denom


def sinr(model: PathLossModel, real: NetworkRealization, draw: ChannelDraw, noise: float) -> float:
    """``L(r0) * serving_gain / (sum_{i>=1} L(r_i) g_i + noise)``."""
    if noise < 0:
        raise DomainError("noise power must be non-negative")
    r0 = serving_distance(real)
    if len(draw.interferer_gains) != len(real) - 1:
        raise DomainError("need one interferer gain per non-serving base station")
    interference = interference_sum(model, real.distances[1:], draw.interferer_gains)
    signal = float(model.gain(np.array([r0]))[0]) * draw.serving_gain
    return sinr_from_terms(signal, interference, noise)


def ase(density: float, sinr_value: float) -> float:
    """``density * log2(1 + sinr)`` in bps/Hz per unit area."""
    if sinr_value < 0 or density < 0:
        raise DomainError("density and sinr must be non-negative")
    return density * math.log2(1.0 + sinr_value)


def normalized_sinr(density: float, n_t: int, sinr_value: float) -> float:
    """``density * sinr / n_t``; tends to ``L0 / (2 pi gamma)`` under linear scaling."""
    if n_t < 1 or not density > 0:
        raise DomainError("need n_t >= 1 and positive density")
    return density * sinr_value / n_t
