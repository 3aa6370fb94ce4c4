import math
from fractions import Fraction

import pytest

from densecell.asymptotics import (
    Scale,
    ase_regime,
    average_sinr_bounds,
    law_scale,
    mimo_factor,
    mimo_sinr_limit,
    miso_sinr_limit,
    predict,
    ratio_limit,
    sinr_scale,
)
from densecell.channel import AntennaScalingLaw, Regime
from densecell.errors import DomainError

from conftest import GAMMA_STRETCHED

CONST = AntennaScalingLaw.constant(1)
SQRT = AntennaScalingLaw.power(1, 0.5)
LIN = AntennaScalingLaw.power(1, 1)
SUPER = AntennaScalingLaw.power(1, 1.5)


class TestLimits:
    def test_disc(self, disc):
        assert miso_sinr_limit(disc) == pytest.approx(1 / math.pi, rel=1e-12)

    def test_stretched(self, stretched):
        assert miso_sinr_limit(stretched) == pytest.approx(1 / (2 * math.pi * GAMMA_STRETCHED), rel=1e-10)

    @pytest.mark.parametrize("y,factor", [(0.0, 1.0), (0.25, 2.25), (1.0, 4.0)])
    def test_mimo_factor(self, y, factor):
        assert mimo_factor(y) == pytest.approx(factor)

    def test_mimo_factor_domain(self):
        with pytest.raises(DomainError):
            mimo_factor(1.5)

    def test_mimo_limit(self, disc):
        assert mimo_sinr_limit(disc, 1.0) == pytest.approx(4 / math.pi)

    def test_ratio_limit(self):
        assert ratio_limit(LIN, LIN) == 1.0
        assert ratio_limit(SQRT, LIN) == 0.0
        assert ratio_limit(AntennaScalingLaw.power(0.5, 1), LIN) == 0.5
        with pytest.raises(DomainError):
            ratio_limit(SUPER, LIN)


class TestRegimes:
    def test_describe_linear(self):
        assert ase_regime(LIN).describe() == "linear, c=1, ASE scale lambda"

    def test_sublinear_scale_is_nt(self):
        r = ase_regime(SQRT)
        assert r.regime is Regime.SUBLINEAR and r.scale == Scale(Fraction(1, 2))
        assert ase_regime(CONST).scale.is_constant

    def test_superlinear_scale(self):
        r = ase_regime(SUPER)
        assert r.scale == Scale(Fraction(1), Fraction(1))

    def test_superlinear_log_only_excess(self):
        r = ase_regime(AntennaScalingLaw.power_log(1, 1, 2))
        assert r.scale == Scale(Fraction(1), Fraction(0), Fraction(1))

    def test_sinr_scale(self):
        assert sinr_scale(SQRT) == Scale(Fraction(-1, 2))
        assert sinr_scale(LIN).is_constant

    def test_scale_ordering(self):
        assert Scale(Fraction(1)) > Scale(Fraction(0), Fraction(5))
        assert Scale(Fraction(1), Fraction(1)) > Scale(Fraction(1))

    def test_bounds(self):
        lo, hi = average_sinr_bounds(LIN, LIN)
        assert lo.is_constant and hi == law_scale(LIN)
        with pytest.raises(DomainError):
            average_sinr_bounds(LIN, SUPER)

    def test_bounds_grid_check(self):
        with pytest.raises(DomainError):
            average_sinr_bounds(CONST, AntennaScalingLaw.constant(2), grid=[1.0])

    def test_predict(self, disc):
        p = predict(disc, LIN, LIN)
        assert p.sinr_limit == pytest.approx(4 / math.pi)
        assert predict(disc, SQRT).sinr_limit == "zero"
        assert predict(disc, SUPER).sinr_limit == "infinite"
        assert p.to_dict()["ase_regime"].startswith("linear")
