"""Closed-form limits and scaling regimes for dense networks.

Growth rates are kept symbolic as ``lambda^a * (log lambda)^b *
(log log lambda)^c`` with rational exponents, so regimes compare exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .channel import AntennaScalingLaw, Regime, antennas_at, classify_scaling
from .errors import DomainError
from .pathloss import PathLossModel, evaluate, gamma_integral


def _frac(x) -> Fraction:
    return Fraction(x).limit_denominator(10**6)


@dataclass(frozen=True, order=True)
class Scale:
    lam: Fraction = Fraction(0)
    log: Fraction = Fraction(0)
    loglog: Fraction = Fraction(0)

    def __mul__(self, other):
        return Scale(self.lam + other.lam, self.log + other.log, self.loglog + other.loglog)

    def __truediv__(self, other):
        return Scale(self.lam - other.lam, self.log - other.log, self.loglog - other.loglog)

    @property
    def is_constant(self):
        return self.lam == self.log == self.loglog == 0

    def __str__(self):
        parts = []
        for name, e in (("lambda", self.lam), ("log(lambda)", self.log), ("log(log(lambda))", self.loglog)):
            if e == 1:
                parts.append(name)
            elif e != 0:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "constant"


LAMBDA = Scale(Fraction(1))


def law_scale(law: AntennaScalingLaw) -> Scale:
    """Growth rate of ``N(lambda)``; ``ln(1 + lambda) ~ log lambda``."""
    if law.form == "constant":
        return Scale()
    return Scale(_frac(law.p), _frac(law.q) if law.form == "power_log" else Fraction(0))


def miso_sinr_limit(model: PathLossModel) -> float:
    """``L0 / (2 pi gamma)``: the limit of ``lambda * SINR / N_t``."""
    return evaluate(model, 0.0) / (2 * math.pi * gamma_integral(model))


def mimo_factor(y: float) -> float:
    if not 0 <= y <= 1:
        raise DomainError("y = lim N_r / N_t must lie in [0, 1]")
    return (1 + math.sqrt(y)) ** 2


def mimo_sinr_limit(model: PathLossModel, y: float) -> float:
    """``L0 (1 + sqrt(y))^2 / (2 pi gamma)``."""
    return miso_sinr_limit(model) * mimo_factor(y)


def ratio_limit(r_law: AntennaScalingLaw, t_law: AntennaScalingLaw) -> float:
    """``y = lim N_r(lambda) / N_t(lambda)``."""
    sr, st = law_scale(r_law), law_scale(t_law)
    if sr > st:
        raise DomainError("receive antennas outgrow transmit antennas")
    if sr < st:
        return 0.0
    if t_law.form == "constant":
        y = r_law.n / t_law.n
    else:
        y = r_law.c / t_law.c
    if y > 1:
        raise DomainError("receive antennas exceed transmit antennas asymptotically")
    return y


@dataclass(frozen=True)
class AseRegime:
    regime: Regime
    scale: Scale
    c: Optional[float] = None

    def describe(self):
        head = f"linear, c={self.c:g}" if self.regime is Regime.LINEAR else self.regime.value
        return f"{head}, ASE scale {self.scale}"


def ase_regime(t_law: AntennaScalingLaw) -> AseRegime:
    """Which growth law the ASE follows for this transmit-antenna law.

    Sublinear: scale ``N_t``. Linear: scale ``lambda``. Superlinear: scale
    ``lambda * log(1 + N_t / lambda)``.
    """
    cls = classify_scaling(t_law)
    if cls.regime is Regime.SUBLINEAR:
        return AseRegime(cls.regime, law_scale(t_law))
    if cls.regime is Regime.LINEAR:
        return AseRegime(cls.regime, LAMBDA, cls.c)
    excess = law_scale(t_law) / LAMBDA
    # log(1 + lambda^a log^b) ~ a log lambda when a > 0, ~ b log log lambda when a == 0
    if excess.lam > 0:
        return AseRegime(cls.regime, LAMBDA * Scale(log=Fraction(1)))
    return AseRegime(cls.regime, LAMBDA * Scale(loglog=Fraction(1)))


def sinr_scale(t_law: AntennaScalingLaw) -> Scale:
    """Growth of the mean SINR: ``N_t / lambda``."""
    return law_scale(t_law) / LAMBDA


def average_sinr_bounds(t_law: AntennaScalingLaw, r_law: AntennaScalingLaw, grid=None):
    """``(N_t / lambda, N_t N_r / lambda)``: bracket on the mean-SINR growth."""
    if grid is not None:
        for lam in grid:
            if antennas_at(r_law, lam) > antennas_at(t_law, lam):
                raise DomainError(f"N_r exceeds N_t at lambda={lam:g}")
    elif law_scale(r_law) > law_scale(t_law):
        raise DomainError("receive antennas outgrow transmit antennas")
    lower = sinr_scale(t_law)
    return lower, lower * law_scale(r_law)


@dataclass(frozen=True)
class AsymptoticPrediction:
    sinr_limit: object  # float, "zero" or "infinite"
    sinr_scale: Scale
    ase_regime: AseRegime
    mimo_factor: float
    bounds: tuple

    def to_dict(self):
        return {
            "sinr_limit": self.sinr_limit,
            "sinr_scale": str(self.sinr_scale),
            "ase_regime": self.ase_regime.describe(),
            "mimo_factor": self.mimo_factor,
            "bounds": [str(b) for b in self.bounds],
        }


def predict(model: PathLossModel, t_law: AntennaScalingLaw,
            r_law: AntennaScalingLaw = AntennaScalingLaw.constant(1)) -> AsymptoticPrediction:
    """Limit of the conditional SINR ``SINR(lambda)`` itself, plus regimes."""
    y = ratio_limit(r_law, t_law)
    factor = mimo_factor(y)
    regime = ase_regime(t_law)
    if regime.regime is Regime.LINEAR:
        limit = miso_sinr_limit(model) * factor * regime.c
    elif regime.regime is Regime.SUBLINEAR:
        limit = "zero"
    else:
        limit = "infinite"
    return AsymptoticPrediction(limit, sinr_scale(t_law), regime, factor,
                                average_sinr_bounds(t_law, r_law))
