"""Deterministic Monte Carlo engine for the typical-user SINR and ASE.

Every trial draws from its own Philox substream keyed by
``(master_seed, lambda_index, trial_index, attempt, stream)``, so any trial
can be replayed alone and results do not depend on how trials are spread
across worker processes.

Base stations inside the *near disc* are simulated point by point, nearest
first. When the active window would hold far more points than
``exact_points``, the annulus beyond the near disc is replaced by one Gamma
draw matching the Campbell mean and variance of its interference.
"""

from __future__ import annotations

import functools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import __version__, kernels
from ..asymptotics import ase_regime, miso_sinr_limit, mimo_factor, ratio_limit
from ..channel import Regime, antennas_at, classify_scaling, serving_gain
from ..config import NetworkConfig, digest
from ..errors import DivergenceError, EstimationError
from ..geometry import Window, sample_ppp, truncation_radius
from ..metrics import TrialResult
from ..pathloss import radial_moment

RNG_ID = (f"numpy-{np.__version__}/Philox4x64-10/SeedSequence(master_seed, "
          "spawn_key=(lambda_index, trial_index, attempt, stream))")
GEOMETRY_STREAM = 0
CHANNEL_STREAM = 1
MAX_ATTEMPTS = 2
CHUNK = 1 << 20
# Aggregate the far field only when it would hold this many times exact_points.
FAR_FIELD_MARGIN = 1.25
CENSOR_WARN_FRACTION = 0.01
CI_Z = 1.959963984540054


def substream(master_seed, lam_index, trial_index, attempt=0, stream=GEOMETRY_STREAM):
    seq = np.random.SeedSequence(master_seed, spawn_key=(lam_index, trial_index, attempt, stream))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class DensityPlan:
    """Per-density sampling layout shared by all trials."""

    index: int
    density: float
    region: str
    radius: float
    near_radius: float
    far_shape: float
    far_scale: float
    active_bound: str
    n_t: tuple
    n_r: tuple

    @property
    def far_mean(self):
        return self.far_shape * self.far_scale


def _plan_one(config, index, lam, r_trunc):
    win = config.window
    if win.shape == "square" and r_trunc <= win.size:
        region, radius, bound = "square", win.size, "window"
    elif win.shape == "square":
        region, radius, bound = "disc", r_trunc, "truncation"
    else:
        region = "disc"
        radius, bound = (win.size, "window") if win.size >= r_trunc else (r_trunc, "truncation")

    near = radius
    shape = scale = 0.0
    if region == "disc" and config.exact_points is not None:
        total = math.pi * lam * radius**2
        if total > FAR_FIELD_MARGIN * config.exact_points:
            near = math.sqrt(config.exact_points / (math.pi * lam))
            mean = 2 * math.pi * lam * radial_moment(config.model, near, radius, 1)
            # Exp(1) gains: E[g^2] = 2
            var = 4 * math.pi * lam * radial_moment(config.model, near, radius, 2)
            if mean > 0 and var > 0:
                shape, scale = mean * mean / var, var / mean
    n_t = tuple(antennas_at(law, lam) for law in config.t_laws)
    n_r = tuple(config.n_r_at(lam) for _ in config.t_laws)
    return DensityPlan(index, lam, region, radius, near, shape, scale, bound, n_t, n_r)


@functools.lru_cache(maxsize=64)
def plan_densities(config: NetworkConfig):
    """``(plans, truncation_radius)`` for a config."""
    r_trunc = truncation_radius(config.model, config.densities[0], config.truncation_eps)
    return tuple(_plan_one(config, i, lam, r_trunc) for i, lam in enumerate(config.densities)), r_trunc


def sample_interference(plan: DensityPlan, model, rng: np.random.Generator, skip: int = 1):
    """One layout: ``(count, r0, interference)``.

    ``interference`` sums ``L(r_i) g_i`` over all base stations but the
    ``skip`` nearest, plus the aggregated far field. ``count`` is the number
    of simulated near-field points (0 means no coverage).
    """
    lam = plan.density
    if plan.region == "square":
        real = sample_ppp(lam, Window.square(plan.radius), rng)
        gains = rng.standard_exponential(len(real))
        if len(real) == 0:
            return 0, math.nan, 0.0
        terms = model.gain(real.distances[skip:]) * gains[skip:]
        return len(real), float(real.distances[0]), math.fsum(terms)

    inv = 1.0 / (math.pi * lam)
    target = math.pi * lam * plan.near_radius**2
    offset = 0.0
    count = 0
    r0 = math.nan
    partials = []
    while True:
        remaining = max(target - offset, 0.0)
        m = min(int(remaining + 6 * math.sqrt(max(remaining, 1.0)) + 16), CHUNK)
        gaps = rng.standard_exponential(m)
        gains = rng.standard_exponential(m)
        n, offset, first, s, c = kernels.disc_chunk(gaps, gains, offset, target, inv, count, skip, model)
        if count == 0 and n > 0:
            r0 = first
        partials += (s, c)
        count += n
        if n < m:
            break
    interference = math.fsum(partials)
    if plan.far_shape > 0:
        interference += float(rng.gamma(plan.far_shape, plan.far_scale))
    return count, r0, interference


@dataclass
class _Block:
    start: int
    r0: np.ndarray
    interference: np.ndarray
    sinr: np.ndarray  # (laws, trials)
    serving: np.ndarray  # (laws, trials)
    censored: np.ndarray
    empty_events: int


def _simulate(config, plan, trial_index):
    """Returns ``(r0, interference, serving_gains, sinrs, censored, empty_events)``."""
    model = config.model
    noise = config.noise
    empty = 0
    for attempt in range(MAX_ATTEMPTS):
        rng = substream(config.master_seed, plan.index, trial_index, attempt, GEOMETRY_STREAM)
        count, r0, interference = sample_interference(plan, model, rng)
        if count == 0:
            empty += 1
            continue
        denom = interference + noise
        if denom == 0:
            continue
        signal_scale = float(model.gain(np.array([r0]))[0])
        gains, sinrs = [], []
        for n_t, n_r in zip(plan.n_t, plan.n_r):
            crng = substream(config.master_seed, plan.index, trial_index, attempt, CHANNEL_STREAM)
            g = serving_gain(config.mode, n_t, n_r, crng)
            gains.append(g)
            sinrs.append(signal_scale * g / denom)
        return r0, interference, gains, sinrs, False, empty
    k = len(plan.n_t)
    return math.nan, math.nan, [math.nan] * k, [math.nan] * k, True, empty


def _run_block(config, plan, start, stop):
    n = stop - start
    k = len(plan.n_t)
    block = _Block(start, np.empty(n), np.empty(n), np.empty((k, n)), np.empty((k, n)),
                   np.zeros(n, dtype=bool), 0)
    for j, t in enumerate(range(start, stop)):
        r0, interf, gains, sinrs, censored, empty = _simulate(config, plan, t)
        block.r0[j] = r0
        block.interference[j] = interf
        block.serving[:, j] = gains
        block.sinr[:, j] = sinrs
        block.censored[j] = censored
        block.empty_events += empty
    return block


def _interference_block(config, plan, start, stop, skip):
    out = np.empty(stop - start)
    for j, t in enumerate(range(start, stop)):
        rng = substream(config.master_seed, plan.index, t, 0, GEOMETRY_STREAM)
        count, _, interference = sample_interference(plan, config.model, rng, skip)
        out[j] = interference if count > skip else math.nan
    return out


def _block_bounds(trials, workers):
    size = max(1, min(500, math.ceil(trials / (4 * workers))))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def _map_blocks(fn, jobs, workers, progress=None):
    """Run ``fn(*job)`` for each job; results come back in job order."""
    results = []
    if workers <= 1:
        for job in jobs:
            results.append(fn(*job))
            if progress:
                progress(job)
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        for job, fut in zip(jobs, futures):
            results.append(fut.result())
            if progress:
                progress(job)
    return results


def run_trial(config: NetworkConfig, lam_index: int, trial_index: int, law_index: int = 0) -> TrialResult:
    """Replay one trial in isolation.

    A censored trial (no coverage twice, or a zero denominator) comes back
    with NaN fields.
    """
    plans, _ = plan_densities(config)
    plan = plans[lam_index]
    r0, interf, gains, sinrs, censored, _ = _simulate(config, plan, trial_index)
    lam = plan.density
    n_t, n_r = plan.n_t[law_index], plan.n_r[law_index]
    s = sinrs[law_index]
    return TrialResult(
        r0=r0,
        serving_gain=gains[law_index],
        interference=interf,
        noise=config.noise,
        sinr=s,
        ase=math.nan if censored else lam * math.log2(1 + s),
        normalized_sinr=lam * s / n_t,
        n_t=n_t,
        n_r=n_r,
        density=lam,
    )


@dataclass(frozen=True)
class DensityRecord:
    law: str
    density: float
    n_t: int
    n_r: int
    mean_sinr: float
    sinr_ci: tuple
    mean_ase: float
    ase_ci: tuple
    mean_norm_sinr: float
    norm_sinr_ci: tuple
    censored: int
    trials: int

    def to_dict(self):
        d = asdict(self)
        for key in ("sinr_ci", "ase_ci", "norm_sinr_ci"):
            d[key] = list(d[key])
        return d


@dataclass
class SweepResult:
    records: list
    metadata: dict = field(default_factory=dict)
    samples: Optional[dict] = field(default=None, repr=False)

    @property
    def laws(self):
        seen = []
        for r in self.records:
            if r.law not in seen:
                seen.append(r.law)
        return seen

    def curve(self, law=None):
        law = law if law is not None else self.laws[0]
        return [r for r in self.records if r.law == law]

    def column(self, name, law=None):
        return np.array([getattr(r, name) for r in self.curve(law)])


def _mean_ci(values):
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, (math.nan, math.nan)
    half = CI_Z * float(np.std(values, ddof=1)) / math.sqrt(n)
    return mean, (mean - half, mean + half)


def asymptote_metadata(config: NetworkConfig) -> dict:
    out = {}
    try:
        out["miso_sinr_limit"] = miso_sinr_limit(config.model)
    except DivergenceError as exc:
        out["miso_sinr_limit"] = None
        out["error"] = str(exc)
        return out
    laws = {}
    for law in config.t_laws:
        entry = {"regime": ase_regime(law).describe()}
        if config.mode == "mimo":
            y = ratio_limit(config.r_law, law)
            entry["y_limit"] = y
            entry["mimo_factor"] = mimo_factor(y)
            entry["normalized_sinr_limit"] = out["miso_sinr_limit"] * mimo_factor(y)
        else:
            entry["normalized_sinr_limit"] = out["miso_sinr_limit"]
        cls = classify_scaling(law)
        if cls.regime is Regime.LINEAR:
            # N_t / lambda -> c, so the SINR itself settles at c times the normalized limit
            entry["sinr_limit"] = cls.c * entry["normalized_sinr_limit"]
        laws[law.label] = entry
    out["laws"] = laws
    return out


def estimate(config: NetworkConfig, progress: Optional[Callable] = None,
             workers: Optional[int] = None, keep_samples: bool = False) -> SweepResult:
    """Sweep the density grid; per-density means and 95% normal CIs.

    ``progress(lam_index, trials_done)`` is called as blocks finish.
    """
    workers = workers or config.workers
    plans, r_trunc = plan_densities(config)
    bounds = _block_bounds(config.trials, workers)
    jobs = [(config, plan, s, e) for plan in plans for (s, e) in bounds]
    done = {}

    def tick(job):
        plan, s, e = job[1], job[2], job[3]
        done[plan.index] = done.get(plan.index, 0) + (e - s)
        if progress:
            progress(plan.index, done[plan.index])

    blocks = _map_blocks(_run_block, jobs, workers, tick)

    n_laws = len(config.t_laws)
    records = []
    warn = []
    samples = {} if keep_samples else None
    plan_meta = []
    per_plan = {p.index: [] for p in plans}
    for job, block in zip(jobs, blocks):
        per_plan[job[1].index].append(block)
    empty_total = 0
    for plan in plans:
        bl = per_plan[plan.index]
        sinr = np.concatenate([b.sinr for b in bl], axis=1)
        censored = np.concatenate([b.censored for b in bl])
        empty_total += sum(b.empty_events for b in bl)
        n_cens = int(censored.sum())
        if n_cens == config.trials:
            raise EstimationError(f"every trial censored at lambda={plan.density:g}")
        if n_cens > CENSOR_WARN_FRACTION * config.trials:
            warn.append(f"{n_cens} of {config.trials} trials censored at lambda={plan.density:g}")
        lam = plan.density
        for k in range(n_laws):
            s = sinr[k][~censored]
            ase = lam * np.log2(1.0 + s)
            norm = lam * s / plan.n_t[k]
            ms, cs = _mean_ci(s)
            ma, ca = _mean_ci(ase)
            mn, cn = _mean_ci(norm)
            records.append(DensityRecord(config.t_laws[k].label, lam, plan.n_t[k], plan.n_r[k],
                                         ms, cs, ma, ca, mn, cn, n_cens, config.trials))
            if keep_samples:
                samples[(k, plan.index)] = {
                    "sinr": s,
                    "r0": np.concatenate([b.r0 for b in bl])[~censored],
                    "interference": np.concatenate([b.interference for b in bl])[~censored],
                    "serving": np.concatenate([b.serving for b in bl], axis=1)[k][~censored],
                }
        plan_meta.append({
            "density": lam,
            "region": plan.region,
            "radius": plan.radius,
            "active_bound": plan.active_bound,
            "near_radius": plan.near_radius,
            "far_field_mean": plan.far_mean,
        })
    total_trials = config.trials * len(plans)
    if empty_total / total_trials > 1e-6:
        warn.append(f"empty realizations resampled in {empty_total} of {total_trials} trials")
    for w in warn:
        warnings.warn(w, RuntimeWarning, stacklevel=2)
    metadata = {
        "schema_version": 1,
        "config_digest": digest(config),
        "config": config.to_dict(),
        "rng": RNG_ID,
        "kernel_backend": kernels.BACKEND,
        "code_version": __version__,
        "truncation_radius": r_trunc,
        "plans": plan_meta,
        "empty_events": empty_total,
        "noise_convention": "noise_db relative to unit transmit power",
        "asymptotes": asymptote_metadata(config),
        "warnings": warn,
    }
    return SweepResult(records, metadata, samples)


def debug_realization(config: NetworkConfig, lam_index: int, trial_index: int):
    """Layout of one trial inside the configured window, from its geometry substream.

    Matches the simulated layout exactly when the window itself is the
    active region; otherwise it is the window-clipped part of a fresh draw.
    """
    lam = config.densities[lam_index]
    rng = substream(config.master_seed, lam_index, trial_index, 0, GEOMETRY_STREAM)
    return sample_ppp(lam, config.window, rng)


def interference_samples(config: NetworkConfig, lam_index: int, skip: int = 1,
                         workers: Optional[int] = None) -> np.ndarray:
    """``sum_{i >= skip} L(r_i) g_i`` for every trial at one density."""
    workers = workers or config.workers
    plans, _ = plan_densities(config)
    plan = plans[lam_index]
    jobs = [(config, plan, s, e, skip) for s, e in _block_bounds(config.trials, workers)]
    return np.concatenate(_map_blocks(_interference_block, jobs, workers))
