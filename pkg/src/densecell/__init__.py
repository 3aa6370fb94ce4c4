"""SINR and area-spectral-efficiency scaling in dense multi-antenna
cellular networks: Poisson layouts, feasible path loss, Monte Carlo."""

__version__ = "0.1.0"
