import math

import numpy as np
import pytest

from densecell.channel import AntennaScalingLaw
from densecell.config import NetworkConfig
from densecell.pathloss import BoundedSingleSlope, DiscModel, StretchedExponential

ETA, KAPPA = 0.9, 0.52
# Gamma(2/kappa) / (kappa eta^(2/kappa)), frozen from mpmath at 30 digits
GAMMA_STRETCHED = 14.311713370280884


@pytest.fixture
def stretched():
    return StretchedExponential(ETA, KAPPA)


@pytest.fixture
def disc():
    return DiscModel(1.0, 1.0)


@pytest.fixture
def r4():
    return BoundedSingleSlope(1.0, 1.0, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config(stretched):
    return NetworkConfig(densities=(1.0, 10.0, 100.0), model=stretched,
                         t_laws=(AntennaScalingLaw.constant(1), AntennaScalingLaw.power(1, 1)),
                         trials=40)


def closed_gamma(eta, kappa):
    return math.gamma(2 / kappa) / (kappa * eta ** (2 / kappa))


# Acceptance criteria append their one-line verdicts here; printed at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
