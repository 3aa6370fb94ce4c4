"""Poisson base-station layouts seen from a typical user at the origin."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, NoCoverageError
from .pathloss import PathLossModel, gamma_integral, tail_integral


@dataclass(frozen=True)
class Window:
    """Disc of ``radius`` or square of ``half_side``, centred on the origin."""

    shape: str
    size: float

    def __post_init__(self):
        if self.shape not in ("disc", "square"):
            raise DomainError("window shape must be 'disc' or 'square'")
        if not (self.size > 0 and math.isfinite(self.size)):
            raise DomainError("window size must be positive and finite")

    @classmethod
    def disc(cls, radius):
        return cls("disc", float(radius))

    @classmethod
    def square(cls, half_side):
        return cls("square", float(half_side))

    @property
    def area(self) -> float:
        if self.shape == "disc":
            return math.pi * self.size**2
        return 4.0 * self.size**2

    @property
    def inscribed_radius(self) -> float:
        return self.size

    def contains_disc(self, radius) -> bool:
        return radius <= self.inscribed_radius

    def to_dict(self):
        key = "radius" if self.shape == "disc" else "half_side"
        return {"shape": self.shape, key: self.size}


@dataclass(frozen=True)
class NetworkRealization:
    """Base stations as (distance, angle) pairs sorted by distance."""

    distances: np.ndarray
    angles: np.ndarray
    density: float
    window: Window

    def __len__(self):
        return len(self.distances)


def sample_ppp(density: float, window: Window, rng: np.random.Generator) -> NetworkRealization:
    """Homogeneous PPP on ``window``: Poisson count, i.i.d. uniform positions."""
    if not density >= 0:
        raise DomainError("density must be non-negative")
    count = rng.poisson(density * window.area)
    if window.shape == "disc":
        dist = window.size * np.sqrt(rng.random(count))
        ang = 2 * math.pi * rng.random(count)
    else:
        xy = rng.uniform(-window.size, window.size, size=(count, 2))
        dist = np.hypot(xy[:, 0], xy[:, 1])
        ang = np.arctan2(xy[:, 1], xy[:, 0])
    order = np.argsort(dist, kind="stable")
    return NetworkRealization(dist[order], ang[order], float(density), window)


def sample_disc_arrivals(density: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted distances of a PPP on a disc, drawn outward from the origin.

    ``pi * density * r_k**2`` are the arrival times of a unit-rate Poisson
    process, so cumulative sums of Exp(1) gaps give the distances in order
    without sorting.
    """
    if not density >= 0:
        raise DomainError("density must be non-negative")
    if density == 0:
        return np.empty(0)
    target = math.pi * density * radius**2
    chunks = []
    offset = 0.0
    while True:
        m = int(target - offset + 6 * math.sqrt(max(target - offset, 1.0)) + 16)
        arrivals = offset + np.cumsum(rng.standard_exponential(m))
        n = int(np.searchsorted(arrivals, target, side="right"))
        chunks.append(arrivals[:n])
        if n < m:
            break
        offset = arrivals[-1]
    return np.sqrt(np.concatenate(chunks) / (math.pi * density))


def serving_distance(real: NetworkRealization) -> float:
    """Distance to the nearest base station."""
    if len(real) == 0:
        raise NoCoverageError("realization has no base stations")
    return float(real.distances[0])


def serving_distance_cdf(r, density):
    """``P(r0 <= r) = 1 - exp(-pi density r**2)``."""
    r = np.asarray(r, dtype=float)
    return -np.expm1(-math.pi * density * r * r)


def truncation_radius(model: PathLossModel, density: float, eps: float,
                      rel_tol: float = 1e-10) -> float:
    """Smallest ``R`` with ``int_R^inf r L(r) dr <= eps * gamma``.

    The expected interference from outside the disc of radius ``R`` is then
    at most ``eps`` of the expected total ``2 pi density gamma``. ``density``
    cancels from the criterion; it is accepted so callers can pass a plan row.
    """
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    if not density > 0:
        raise DomainError("density must be positive")
    if eps == 1:
        return 0.0
    gamma = gamma_integral(model)
    target = eps * gamma

    lo, hi = 0.0, 1.0
    while tail_integral(model, hi) > target:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise DivergenceError("tail never drops below the tolerance", partial=hi)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if tail_integral(model, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def write_realizations_csv(path, realizations):
    """Debug dump: one row per base station with columns trial, distance, angle."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "distance", "angle"])
        for trial, real in realizations:
            for d, a in zip(real.distances, real.angles):
                w.writerow([trial, repr(float(d)), repr(float(a))])
