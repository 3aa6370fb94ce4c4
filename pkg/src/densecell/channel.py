"""Small-scale fading: exponential interference gains, Gamma MISO gains and
the largest eigenvalue of an i.i.d. complex Gaussian channel Gram matrix."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
DIRECT_MAX_DIM = 4


@dataclass(frozen=True)
class AntennaScalingLaw:
    """``N(lambda)``: ``constant`` n, ``power`` ceil(c lambda^p) or
    ``power_log`` ceil(c lambda^p ln(1 + lambda)^q)."""

    form: str
    c: float = 1.0
    p: float = 0.0
    q: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.form not in ("constant", "power", "power_log"):
            raise DomainError(f"unknown antenna law form {self.form!r}")
        if self.form == "constant":
            if int(self.n) != self.n or self.n < 1:
                raise DomainError("constant antenna count must be a positive integer")
            object.__setattr__(self, "n", int(self.n))
        else:
            if not (self.c > 0 and self.p > 0):
                raise DomainError("c and p must be positive")
            if self.q < 0:
                raise DomainError("q must be non-negative")
            if self.form == "power" and self.q != 0:
                raise DomainError("power law takes no log exponent; use power_log")

    @classmethod
    def constant(cls, n):
        return cls("constant", n=n)

    @classmethod
    def power(cls, c, p):
        return cls("power", c=float(c), p=float(p))

    @classmethod
    def power_log(cls, c, p, q):
        return cls("power_log", c=float(c), p=float(p), q=float(q))

    @property
    def label(self) -> str:
        if self.form == "constant":
            return f"N={self.n}"
        core = f"{self.c:g}*lam^{self.p:g}"
        if self.form == "power_log":
            core += f"*ln(1+lam)^{self.q:g}"
        return f"N=ceil({core})"

    def to_dict(self):
        if self.form == "constant":
            return {"form": "constant", "n": self.n}
        d = {"form": self.form, "c": self.c, "p": self.p}
        if self.form == "power_log":
            d["q"] = self.q
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        form = d.pop("form", None)
        try:
            if form == "constant":
                return cls.constant(d["n"])
            if form == "power":
                return cls.power(d["c"], d["p"])
            if form == "power_log":
                return cls.power_log(d["c"], d["p"], d["q"])
        except KeyError as exc:
            raise ConfigError(f"antenna law {form!r} is missing {exc}") from None
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        raise ConfigError(f"unknown antenna law form {form!r}")


def antennas_at(law: AntennaScalingLaw, density: float) -> int:
    """Integer antenna count at ``density``; values within rounding of an
    integer are not bumped by the ceiling."""
    if not density > 0:
        raise DomainError("density must be positive")
    if law.form == "constant":
        return law.n
    v = law.c * density**law.p
    if law.form == "power_log":
        v *= math.log1p(density) ** law.q
    nearest = round(v)
    if abs(v - nearest) <= 1e-9 * max(1.0, v):
        return max(1, int(nearest))
    return max(1, math.ceil(v))


class Regime(enum.Enum):
    SUBLINEAR = "sublinear"
    LINEAR = "linear"
    SUPERLINEAR = "superlinear"


@dataclass(frozen=True)
class ScalingClass:
    regime: Regime
    c: Optional[float] = None

    def __str__(self):
        if self.regime is Regime.LINEAR:
            return f"linear, c={self.c:g}"
        return self.regime.value


def classify_scaling(law: AntennaScalingLaw) -> ScalingClass:
    """Asymptotic class of ``N(lambda) / lambda``."""
    if law.form == "constant" or law.p < 1:
        return ScalingClass(Regime.SUBLINEAR)
    if law.p == 1 and (law.form == "power" or law.q == 0):
        return ScalingClass(Regime.LINEAR, law.c)
    return ScalingClass(Regime.SUPERLINEAR)


@dataclass(frozen=True)
class ChannelDraw:
    serving_gain: float
    interferer_gains: np.ndarray
    n_t: int
    n_r: int


def sample_exp_gains(count: int, rng: np.random.Generator) -> np.ndarray:
    if count < 0:
        raise DomainError("count must be non-negative")
    return rng.standard_exponential(count)


def sample_miso_gain(n_t: int, rng: np.random.Generator) -> float:
    """MRT beamforming gain ``|h|^2`` ~ Gamma(n_t, 1)."""
    if n_t < 1:
        raise DomainError("n_t must be at least 1")
    return float(rng.standard_gamma(n_t))


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """CN(0, 1) entries: real and imaginary parts each of variance 1/2."""
    z = rng.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


def max_eig_power(gram: np.ndarray, start: np.ndarray, tol: float = POWER_TOL,
                  max_iter: int = POWER_MAX_ITER) -> float:
    """Largest eigenvalue of a Hermitian PSD matrix by power iteration.

    The Rayleigh quotient converges geometrically; iteration stops when the
    extrapolated remaining change (last step times ``q / (1 - q)`` with ``q``
    the observed contraction) drops below ``tol`` relative. If the cap is hit
    the iteration restarts once from the heaviest column of ``gram``.
    """
    n = gram.shape[0]
    if n == 1:
        return float(gram[0, 0].real)
    starts = [start, gram[:, int(np.argmax(np.linalg.norm(gram, axis=0)))]]
    best = 0.0
    for v in starts:
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        v = v / nv
        rho_prev = None
        step_prev = None
        for _ in range(max_iter):
            w = gram @ v
            rho = float(np.vdot(v, w).real)
            nw = np.linalg.norm(w)
            if nw == 0:
                return 0.0
            v = w / nw
            if rho_prev is not None:
                step = abs(rho - rho_prev)
                if step == 0:
                    return rho
                if step_prev is not None and step_prev > 0:
                    q = min(step / step_prev, 0.999999)
                    if step * q / (1 - q) <= tol * abs(rho):
                        return rho
                step_prev = step
            rho_prev = rho
        best = max(best, rho)
    warnings.warn("power iteration hit the iteration cap twice", RuntimeWarning, stacklevel=2)
    return best


def sample_mimo_max_eig(n_t: int, n_r: int, rng: np.random.Generator) -> float:
    """Eigen-beamforming gain: largest eigenvalue of ``H H*`` for an
    ``n_r x n_t`` matrix of CN(0, 1) entries.

    The smaller Gram matrix (``n_r x n_r``) carries the same nonzero
    spectrum. Dimensions up to 4 use a dense eigensolve; larger ones use
    power iteration from a start vector drawn from ``rng`` after ``H``.
    """
    if n_t < 1 or n_r < 1:
        raise DomainError("antenna counts must be positive")
    if n_r > n_t:
        raise DomainError("n_r must not exceed n_t")
    h = complex_gaussian((n_r, n_t), rng)
    if n_r == 1:
        return float(np.vdot(h[0], h[0]).real)
    gram = h @ h.conj().T
    if n_r <= DIRECT_MAX_DIM:
        return float(np.linalg.eigvalsh(gram)[-1])
    start = complex_gaussian(n_r, rng)
    return max_eig_power(gram, start)


def serving_gain(mode: str, n_t: int, n_r: int, rng: np.random.Generator) -> float:
    if mode == "miso":
        return sample_miso_gain(n_t, rng)
    return sample_mimo_max_eig(n_t, n_r, rng)
