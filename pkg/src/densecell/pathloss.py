"""Physically feasible path-loss models.

A model is a large-scale gain function ``L(r)`` on ``[0, inf)``. It is
feasible when ``L(0)`` is finite and positive, ``L(r) <= L(0)`` everywhere,
and ``gamma = int_0^inf r L(r) dr`` is finite and positive.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DivergenceError, DomainError, InvalidWitnessError
from .quadrature import integrate

GAMMA_REL_TOL = 1e-10

# Falsification grid for "for all r" conditions.
GRID_MIN = 1e-6
GRID_MAX = 1e4
GRID_POINTS = 4096

# Kernel codes understood by the compiled interference kernel.
KERNEL_STRETCHED_EXP = 0
KERNEL_SINGLE_SLOPE = 1
KERNEL_DISC = 2
KERNEL_MULTI_SLOPE = 3


def _as_array(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("distance must be non-negative")
    return r


class PathLossModel:
    """Base class; subclasses are frozen dataclasses."""

    variant: str = ""
    unit: str

    def gain(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def l0(self) -> float:
        return float(self.gain(np.zeros(1))[0])

    @property
    def breakpoints(self) -> tuple:
        """Distances where ``L`` is not smooth."""
        return ()

    @property
    def support_radius(self) -> float:
        """Radius beyond which ``L`` is identically zero (``inf`` if none)."""
        return math.inf

    @property
    def domain_max(self) -> float:
        """Largest distance ``evaluate`` accepts."""
        return math.inf

    @property
    def analytically_monotone(self) -> bool:
        return False

    def kernel_spec(self) -> Optional[tuple]:
        """``(code, params)`` for the compiled kernel, or None if unsupported."""
        return None

    def to_dict(self) -> dict:
        d = {"variant": self.variant}
        d.update(asdict(self))
        return d


@dataclass(frozen=True)
class StretchedExponential(PathLossModel):
    """``L(r) = exp(-eta * r**kappa)``."""

    eta: float
    kappa: float
    unit: str = "km"
    variant = "stretched_exp"

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError("eta must be positive")
        if not 0 < self.kappa <= 1:
            raise DomainError("kappa must lie in (0, 1]")

    def gain(self, r):
        return np.exp(-self.eta * np.power(r, self.kappa))

    @property
    def l0(self):
        return 1.0

    @property
    def analytically_monotone(self):
        return True

    def kernel_spec(self):
        return KERNEL_STRETCHED_EXP, np.array([self.eta, self.kappa], dtype=float)


@dataclass(frozen=True)
class BoundedSingleSlope(PathLossModel):
    """``L(r) = l0 * min(1, (r / r_c)**-eta)``."""

    l0_gain: float
    r_c: float
    eta: float
    unit: str = "km"
    variant = "single_slope"

    def __post_init__(self):
        if not (self.l0_gain > 0 and math.isfinite(self.l0_gain)):
            raise DomainError("l0 must be positive and finite")
        if not self.r_c > 0:
            raise DomainError("r_c must be positive")
        if not self.eta > 2:
            raise DomainError("eta must exceed 2 for a finite gamma")

    def gain(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            tail = np.power(np.maximum(r, self.r_c) / self.r_c, -self.eta)
        return self.l0_gain * tail

    @property
    def l0(self):
        return self.l0_gain

    @property
    def breakpoints(self):
        return (self.r_c,)

    @property
    def analytically_monotone(self):
        return True

    def kernel_spec(self):
        return KERNEL_SINGLE_SLOPE, np.array([self.l0_gain, self.r_c, self.eta], dtype=float)


@dataclass(frozen=True)
class BoundedMultiSlope(PathLossModel):
    """Flat at ``l0`` up to the first breakpoint, then continuous power-law
    segments with the given exponents.

    Segment ``k`` covers ``[breakpoints[k], breakpoints[k+1])`` and decays as
    ``r**-exponents[k]``. The last exponent must exceed 2.
    """

    l0_gain: float
    breakpoints_: tuple
    exponents: tuple
    unit: str = "km"
    variant = "multi_slope"

    def __post_init__(self):
        object.__setattr__(self, "breakpoints_", tuple(float(b) for b in self.breakpoints_))
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        b, e = self.breakpoints_, self.exponents
        if not (self.l0_gain > 0 and math.isfinite(self.l0_gain)):
            raise DomainError("l0 must be positive and finite")
        if not b or len(b) != len(e):
            raise DomainError("need one exponent per breakpoint")
        if b[0] <= 0 or any(x >= y for x, y in zip(b, b[1:])):
            raise DomainError("breakpoints must be positive and strictly increasing")
        if any(x < 0 for x in e):
            raise DomainError("exponents must be non-negative")
        if e[-1] <= 2:
            raise DomainError("last exponent must exceed 2 for a finite gamma")

    @property
    def segment_scales(self) -> tuple:
        """``c_k`` with ``L(r) = c_k * r**-exponents[k]`` on segment ``k``."""
        scales = []
        level = self.l0_gain
        for k, (b, e) in enumerate(zip(self.breakpoints_, self.exponents)):
            scales.append(level * b**e)
            if k + 1 < len(self.breakpoints_):
                level = scales[-1] * self.breakpoints_[k + 1] ** -e
        return tuple(scales)

    def gain(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, float(self.l0_gain))
        b = self.breakpoints_
        for k, (c, e) in enumerate(zip(self.segment_scales, self.exponents)):
            hi = b[k + 1] if k + 1 < len(b) else np.inf
            m = (r >= b[k]) & (r < hi)
            out[m] = c * np.power(r[m], -e)
        return out

    @property
    def l0(self):
        return self.l0_gain

    @property
    def breakpoints(self):
        return self.breakpoints_

    @property
    def analytically_monotone(self):
        return True

    def kernel_spec(self):
        params = [self.l0_gain, float(len(self.breakpoints_))]
        params += list(self.breakpoints_) + list(self.exponents) + list(self.segment_scales)
        return KERNEL_MULTI_SLOPE, np.array(params, dtype=float)

    def to_dict(self):
        return {
            "variant": self.variant,
            "l0": self.l0_gain,
            "breakpoints": list(self.breakpoints_),
            "exponents": list(self.exponents),
            "unit": self.unit,
        }


@dataclass(frozen=True)
class DiscModel(PathLossModel):
    """``L(r) = l0`` inside radius ``radius`` and zero outside."""

    l0_gain: float
    radius: float
    unit: str = "km"
    variant = "disc"

    def __post_init__(self):
        if not (self.l0_gain > 0 and math.isfinite(self.l0_gain)):
            raise DomainError("l0 must be positive and finite")
        if not self.radius > 0:
            raise DomainError("radius must be positive")

    def gain(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.radius, float(self.l0_gain), 0.0)

    @property
    def l0(self):
        return self.l0_gain

    @property
    def breakpoints(self):
        return (self.radius,)

    @property
    def support_radius(self):
        return self.radius

    @property
    def analytically_monotone(self):
        return True

    def kernel_spec(self):
        return KERNEL_DISC, np.array([self.l0_gain, self.radius], dtype=float)


EXTRAPOLATIONS = ("none", "zero", "exponential")


@dataclass(frozen=True)
class Tabulated(PathLossModel):
    """Sampled gains with log-gain interpolated linearly in ``r``.

    Below the first sample the first gain is held. Beyond the last sample
    ``extrapolation`` decides: ``"none"`` raises, ``"zero"`` returns 0 and
    ``"exponential"`` continues the last segment's log-slope.
    """

    r: tuple
    gains: tuple
    extrapolation: str = "none"
    unit: str = "km"
    variant = "tabulated"

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        object.__setattr__(self, "gains", tuple(float(x) for x in self.gains))
        r, g = self.r, self.gains
        if len(r) < 2 or len(r) != len(g):
            raise DomainError("need at least two (r, gain) samples")
        if r[0] < 0 or any(x >= y for x, y in zip(r, r[1:])):
            raise DomainError("sample distances must be non-negative and increasing")
        if any(not x > 0 for x in g):
            raise DomainError("sample gains must be positive")
        if self.extrapolation not in EXTRAPOLATIONS:
            raise DomainError(f"extrapolation must be one of {EXTRAPOLATIONS}")

    def gain(self, r):
        r = np.asarray(r, dtype=float)
        rs = np.asarray(self.r)
        logg = np.log(np.asarray(self.gains))
        beyond = r > rs[-1]
        if self.extrapolation == "none" and np.any(beyond):
            raise DomainError(f"distance beyond the table end {rs[-1]} with no extrapolation")
        with np.errstate(over="ignore"):
            out = np.exp(np.interp(r, rs, logg))
            if np.any(beyond):
                if self.extrapolation == "zero":
                    out[beyond] = 0.0
                else:
                    slope = (logg[-1] - logg[-2]) / (rs[-1] - rs[-2])
                    out[beyond] = np.exp(logg[-1] + slope * (r[beyond] - rs[-1]))
        return out

    @property
    def breakpoints(self):
        return self.r

    @property
    def domain_max(self):
        return self.r[-1] if self.extrapolation == "none" else math.inf

    @property
    def support_radius(self):
        return self.r[-1] if self.extrapolation in ("none", "zero") else math.inf

    def to_dict(self):
        return {
            "variant": self.variant,
            "r": list(self.r),
            "gains": list(self.gains),
            "extrapolation": self.extrapolation,
            "unit": self.unit,
        }


def power_law_table(eta, r_min=1e-6, r_max=1e4, points=512, unit="km"):
    """Tabulated stand-in for the singular power law ``r**-eta``."""
    r = np.geomspace(r_min, r_max, points)
    return Tabulated(tuple(r), tuple(r**-eta), extrapolation="exponential", unit=unit)


def evaluate(model: PathLossModel, r):
    """Gain ``L(r)``; scalar in, float out, array in, array out."""
    arr = _as_array(r)
    out = model.gain(arr)
    if arr.ndim == 0:
        return float(out)
    return out


def radial_moment(model: PathLossModel, a: float, b: float = math.inf, power: int = 1,
                  rel_tol: float = GAMMA_REL_TOL) -> float:
    """``int_a^b r * L(r)**power dr`` by adaptive quadrature."""
    if b <= a:
        return 0.0
    b = min(b, model.support_radius)
    if b <= a:
        return 0.0
    if power == 1:
        f = lambda r: r * model.gain(r)
    else:
        f = lambda r: r * model.gain(r) ** power
    value, _ = integrate(f, a, b, rel_tol=rel_tol, points=model.breakpoints)
    return value


def gamma_integral(model: PathLossModel) -> float:
    """``gamma = int_0^inf r L(r) dr``.

    Raises ``DivergenceError`` (carrying the partial value) when the tail
    does not converge.
    """
    value = radial_moment(model, 0.0)
    if not (math.isfinite(value) and value > 0):
        raise DivergenceError(f"gamma integral is not finite-positive: {value!r}", partial=value)
    return value


def tail_integral(model: PathLossModel, radius: float) -> float:
    """``int_R^inf r L(r) dr``."""
    return radial_moment(model, radius)


@dataclass
class FeasibilityReport:
    l0: float
    condition_i: bool
    condition_ii: bool
    worst_violation_r: Optional[float]
    condition_iii: bool
    gamma: Optional[float]
    assumption1: Optional[dict] = None
    messages: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.condition_i and self.condition_ii and self.condition_iii

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "condition_i": {"pass": self.condition_i, "l0": self.l0},
            "condition_ii": {"pass": self.condition_ii, "worst_violation_r": self.worst_violation_r},
            "condition_iii": {"pass": self.condition_iii, "gamma": self.gamma},
            "assumption1": self.assumption1 or "not-checked",
            "messages": list(self.messages),
        }


def feasibility_grid():
    return np.concatenate([[0.0], np.geomspace(GRID_MIN, GRID_MAX, GRID_POINTS)])


def validate_feasibility(model: PathLossModel, max_l0: float = 1e6, rel_tol: float = 1e-12
                         ) -> FeasibilityReport:
    """Check the three feasibility conditions; failures are report entries.

    ``max_l0`` treats a gain at the origin above that level as a numerical
    singularity (tabulated power laws hold ``r_min**-eta`` there).
    """
    messages = []
    try:
        l0 = float(model.gain(np.zeros(1))[0])
    except (DomainError, FloatingPointError) as exc:
        l0 = math.nan
        messages.append(f"L(0) not evaluable: {exc}")
    cond_i = math.isfinite(l0) and 0 < l0 <= max_l0
    if math.isfinite(l0) and l0 > max_l0:
        messages.append(f"L(0) = {l0:.3g} exceeds {max_l0:.3g}: singular at the origin")

    grid = feasibility_grid()
    grid = grid[grid <= model.domain_max]
    try:
        values = model.gain(grid)
        bad = values > l0 * (1 + rel_tol)
        cond_ii = bool(math.isfinite(l0) and not np.any(bad) and np.all(np.isfinite(values)))
        worst = float(grid[np.argmax(values)]) if np.any(bad) else None
    except DomainError as exc:
        cond_ii, worst = False, None
        messages.append(f"grid evaluation failed: {exc}")
    if cond_ii and model.analytically_monotone:
        messages.append("condition (ii) also holds analytically (monotone variant)")

    try:
        gamma = gamma_integral(model)
        cond_iii = True
    except DivergenceError as exc:
        gamma, cond_iii = None, False
        messages.append(f"gamma integral failed: {exc}")
    return FeasibilityReport(l0, cond_i, bool(cond_ii), worst, cond_iii, gamma, None, messages)


@dataclass(frozen=True)
class Assumption1Witness:
    """Lower bound ``L~`` used to certify the interference-tail assumption on ``[r0, inf)``."""

    r0: float
    zeta: float
    lower: Callable
    derivative: Callable
    lambda_c: float = 0.0
    description: str = ""


@dataclass
class Assumption1Report:
    condition_1: bool
    condition_2: bool
    condition_3: bool
    min_ratio: float
    integral: Optional[float]
    worst_r: Optional[float] = None

    @property
    def passed(self):
        return self.condition_1 and self.condition_2 and self.condition_3

    def to_dict(self):
        return {
            "pass": self.passed,
            "condition_1": self.condition_1,
            "condition_2": self.condition_2,
            "condition_3": self.condition_3,
            "min_ratio": self.min_ratio,
            "integral": self.integral,
            "worst_r": self.worst_r,
        }


def default_witness(model: PathLossModel) -> Optional[Assumption1Witness]:
    """Closed-form witness for the parametric variants, None otherwise."""
    if isinstance(model, StretchedExponential):
        eta, kappa = model.eta, model.kappa
        # r L / (-L') = r**(2 - kappa) / (eta kappa) >= 1 / (eta kappa) on r >= 1
        return Assumption1Witness(
            r0=1.0,
            zeta=1.0 / (eta * kappa),
            lower=lambda r: np.exp(-eta * np.power(r, kappa)),
            derivative=lambda r: -eta * kappa * np.power(r, kappa - 1) * np.exp(-eta * np.power(r, kappa)),
            lambda_c=0.0,
            description="L itself on [1, inf)",
        )
    if isinstance(model, (BoundedSingleSlope, BoundedMultiSlope)):
        if isinstance(model, BoundedSingleSlope):
            r0, c, e = model.r_c, model.l0_gain * model.r_c**model.eta, model.eta
        else:
            r0, c, e = model.breakpoints_[-1], model.segment_scales[-1], model.exponents[-1]
        # r L / (-L') = r**2 / e
        return Assumption1Witness(
            r0=r0,
            zeta=r0**2 / e,
            lower=lambda r: c * np.power(r, -e),
            derivative=lambda r: -e * c * np.power(r, -e - 1),
            lambda_c=0.0,
            description="last power-law segment",
        )
    return None


def check_assumption1(model: PathLossModel, witness: Assumption1Witness, lambda0: float,
                      r_max: float = GRID_MAX, points: int = GRID_POINTS,
                      rel_tol: float = 1e-12) -> Assumption1Report:
    """Grid check of conditions 1 and 2, quadrature check of condition 3."""
    if not lambda0 > witness.lambda_c:
        raise DomainError("lambda0 must exceed the witness threshold lambda_c")
    lo = max(witness.r0, GRID_MIN)
    grid = np.geomspace(lo, max(r_max, 10 * lo), points)
    lower = np.asarray(witness.lower(grid), dtype=float)
    steps = np.diff(lower)
    if np.any(steps > 0) or not np.any(steps < 0):
        raise InvalidWitnessError("witness lower bound is not decreasing on the grid")

    actual = model.gain(grid)
    viol = lower > actual * (1 + rel_tol) + 1e-300
    cond1 = not np.any(viol)
    worst = float(grid[np.argmax(viol)]) if np.any(viol) else None

    deriv = np.asarray(witness.derivative(grid), dtype=float)
    positive = lower > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(positive & (deriv < 0), grid * lower / -deriv, 0.0)
    min_ratio = float(np.min(ratio))
    cond2 = min_ratio >= witness.zeta * (1 - rel_tol)

    pi_lam = math.pi * lambda0

    def integrand(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            log_l = np.log(np.asarray(witness.lower(r), dtype=float))
            val = np.exp(np.log(np.maximum(r, 1e-300)) - 2 * log_l - pi_lam * r * r)
        return np.where(np.isfinite(val), val, np.inf)

    try:
        integral, _ = integrate(integrand, witness.r0, math.inf, rel_tol=1e-8)
        cond3 = math.isfinite(integral)
    except DivergenceError:
        integral, cond3 = None, False
    return Assumption1Report(bool(cond1), bool(cond2), bool(cond3), min_ratio, integral, worst)


_VARIANTS = {
    "stretched_exp": StretchedExponential,
    "single_slope": BoundedSingleSlope,
    "multi_slope": BoundedMultiSlope,
    "disc": DiscModel,
    "tabulated": Tabulated,
}


def from_dict(d: dict) -> PathLossModel:
    """Build a model from its config mapping (the ``pathloss`` section)."""
    d = dict(d)
    try:
        variant = d.pop("variant")
    except KeyError:
        raise ConfigError("pathloss section needs a 'variant'") from None
    unit = d.pop("unit", "km")
    try:
        if variant == "stretched_exp":
            return StretchedExponential(float(d["eta"]), float(d["kappa"]), unit)
        if variant == "single_slope":
            return BoundedSingleSlope(float(d["l0"]), float(d["r_c"]), float(d["eta"]), unit)
        if variant == "multi_slope":
            return BoundedMultiSlope(float(d["l0"]), tuple(d["breakpoints"]), tuple(d["exponents"]), unit)
        if variant == "disc":
            return DiscModel(float(d["l0"]), float(d["radius"]), unit)
        if variant == "tabulated":
            if "power_law" in d:
                return power_law_table(float(d["power_law"]), float(d.get("r_min", 1e-6)),
                                       float(d.get("r_max", 1e4)), int(d.get("points", 512)), unit)
            return Tabulated(tuple(d["r"]), tuple(d["gains"]), d.get("extrapolation", "none"), unit)
    except KeyError as exc:
        raise ConfigError(f"pathloss variant {variant!r} is missing {exc}") from None
    except DomainError as exc:
        raise ConfigError(f"invalid pathloss parameters: {exc}") from None
    raise ConfigError(f"unknown pathloss variant {variant!r}; expected one of {sorted(_VARIANTS)}")


def to_dict(model: PathLossModel) -> dict:
    d = model.to_dict()
    if isinstance(model, (BoundedSingleSlope, DiscModel)):
        d["l0"] = d.pop("l0_gain")
    return d
