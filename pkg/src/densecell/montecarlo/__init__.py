"""Monte Carlo engine and verification experiments."""

from .engine import (
    DensityPlan,
    DensityRecord,
    SweepResult,
    debug_realization,
    estimate,
    interference_samples,
    plan_densities,
    run_trial,
    sample_interference,
    substream,
)
