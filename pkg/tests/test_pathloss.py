import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densecell import pathloss
from densecell.errors import ConfigError, DomainError, InvalidWitnessError
from densecell.pathloss import (
    Assumption1Witness,
    BoundedMultiSlope,
    BoundedSingleSlope,
    DiscModel,
    StretchedExponential,
    Tabulated,
    check_assumption1,
    default_witness,
    evaluate,
    gamma_integral,
    power_law_table,
    radial_moment,
    tail_integral,
    validate_feasibility,
)

from conftest import GAMMA_STRETCHED, closed_gamma


class TestGammaIntegral:
    def test_disc(self, disc):
        assert gamma_integral(disc) == pytest.approx(0.5, rel=1e-12)

    def test_bounded_r4(self, r4):
        # int_0^1 r dr + int_1^inf r^-3 dr = 1/2 + 1/2
        assert gamma_integral(r4) == pytest.approx(1.0, rel=1e-12)

    def test_stretched_frozen(self, stretched):
        assert gamma_integral(stretched) == pytest.approx(GAMMA_STRETCHED, rel=1e-10)

    def test_multi_slope_matches_single_when_one_segment(self):
        m = BoundedMultiSlope(1.0, (1.0,), (4.0,))
        assert gamma_integral(m) == pytest.approx(1.0, rel=1e-12)

    def test_multi_slope_closed_form(self):
        # L = 1 on [0,1], r^-3 on [1,2], 2^-3 (r/2)^-5 beyond
        m = BoundedMultiSlope(1.0, (1.0, 2.0), (3.0, 5.0))
        want = 0.5 + (1 - 0.5) + 2.0**-3 * 2.0**5 * 2.0**-3 / 3
        assert gamma_integral(m) == pytest.approx(want, rel=1e-10)

    def test_disc_tail_and_moment(self, disc):
        assert tail_integral(disc, 0.5) == pytest.approx(0.375, rel=1e-12)
        assert radial_moment(disc, 0.0, math.inf, power=2) == pytest.approx(0.5, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.2, 3.0), st.floats(0.3, 1.0))
    def test_stretched_closed_form(self, eta, kappa):
        m = StretchedExponential(eta, kappa)
        assert gamma_integral(m) == pytest.approx(closed_gamma(eta, kappa), rel=1e-8)


class TestModels:
    def test_stretched_values(self, stretched):
        r = np.array([0.0, 1.0, 4.0])
        np.testing.assert_allclose(stretched.gain(r), np.exp(-0.9 * r**0.52), rtol=1e-15)
        assert stretched.l0 == 1.0

    def test_single_slope_continuous_at_knee(self):
        m = BoundedSingleSlope(2.0, 0.5, 3.0)
        assert m.gain(np.array([0.5 - 1e-12]))[0] == pytest.approx(m.gain(np.array([0.5 + 1e-12]))[0])

    def test_single_slope_needs_eta_above_two(self):
        with pytest.raises(DomainError):
            BoundedSingleSlope(1.0, 1.0, 2.0)

    def test_multi_slope_continuous(self):
        m = BoundedMultiSlope(1.0, (0.1, 1.0, 5.0), (2.2, 3.0, 4.5))
        for b in m.breakpoints:
            lo, hi = m.gain(np.array([b * (1 - 1e-12), b * (1 + 1e-12)]))
            assert lo == pytest.approx(hi, rel=1e-9)

    def test_multi_slope_rejects_bad_tail(self):
        with pytest.raises(DomainError):
            BoundedMultiSlope(1.0, (1.0,), (2.0,))

    def test_disc_cutoff(self, disc):
        np.testing.assert_array_equal(disc.gain(np.array([0.0, 1.0, 1.0001])), [1.0, 1.0, 0.0])

    def test_evaluate_rejects_negative(self, stretched):
        with pytest.raises(DomainError):
            evaluate(stretched, -1.0)

    def test_tabulated_interpolates_log_linearly(self):
        t = Tabulated((1.0, 2.0), (1.0, 0.25), "zero")
        assert t.gain(np.array([1.5]))[0] == pytest.approx(0.5)
        assert t.gain(np.array([0.5]))[0] == 1.0
        assert t.gain(np.array([3.0]))[0] == 0.0

    def test_tabulated_none_extrapolation_rejects(self):
        t = Tabulated((1.0, 2.0), (1.0, 0.5), "none")
        with pytest.raises(DomainError):
            evaluate(t, 3.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 4.0), st.floats(0.2, 1.0),
           st.lists(st.floats(0, 1e3), min_size=2, max_size=20))
    def test_stretched_monotone_bounded(self, eta, kappa, rs):
        m = StretchedExponential(eta, kappa)
        r = np.sort(np.array(rs))
        g = m.gain(r)
        assert np.all(np.diff(g) <= 0)
        assert np.all(g <= m.l0)


class TestFeasibility:
    def test_stretched_feasible(self, stretched):
        rep = validate_feasibility(stretched)
        assert rep.feasible and rep.gamma == pytest.approx(GAMMA_STRETCHED, rel=1e-10)

    def test_power_law_table_singular(self):
        rep = validate_feasibility(power_law_table(4.0))
        assert not rep.condition_i
        assert not rep.feasible

    def test_non_monotone_table_flags_condition_ii(self):
        t = Tabulated((0.0, 1.0, 2.0), (0.5, 1.0, 0.1), "exponential")
        rep = validate_feasibility(t)
        assert not rep.condition_ii
        assert rep.worst_violation_r == pytest.approx(1.0, rel=0.05)

    def test_report_dict(self, disc):
        d = validate_feasibility(disc).to_dict()
        assert d["feasible"] and d["condition_iii"]["gamma"] == pytest.approx(0.5)


class TestAssumption1:
    def test_stretched_default_witness(self, stretched):
        w = default_witness(stretched)
        rep = check_assumption1(stretched, w, 1.0)
        assert rep.passed
        # min of r^(2 - kappa) / (eta kappa) on r >= 1 is at r = 1
        assert rep.min_ratio == pytest.approx(1 / (0.9 * 0.52), rel=1e-9)

    def test_slope_witness(self):
        m = BoundedSingleSlope(1.0, 1.0, 4.0)
        rep = check_assumption1(m, default_witness(m), 1.0)
        assert rep.passed and rep.min_ratio == pytest.approx(0.25, rel=1e-9)

    def test_disc_has_no_default_witness(self, disc):
        assert default_witness(disc) is None

    def test_increasing_witness_rejected(self, stretched):
        w = Assumption1Witness(1.0, 1.0, lambda r: r, lambda r: np.ones_like(r), 0.0, "bad")
        with pytest.raises(InvalidWitnessError):
            check_assumption1(stretched, w, 1.0)

    def test_witness_above_model_fails_condition_1(self, stretched):
        w = Assumption1Witness(1.0, 0.1, lambda r: 2 * np.exp(-0.5 * r),
                               lambda r: -np.exp(-0.5 * r), 0.0, "too high")
        rep = check_assumption1(stretched, w, 1.0)
        assert not rep.condition_1

    def test_lambda0_below_threshold(self, stretched):
        w = default_witness(stretched)
        with pytest.raises(DomainError):
            check_assumption1(stretched, w, 0.0)


class TestSerialization:
    @pytest.mark.parametrize("model", [
        StretchedExponential(0.9, 0.52),
        BoundedSingleSlope(1.0, 0.2, 3.5),
        BoundedMultiSlope(1.0, (0.1, 1.0), (2.5, 4.0)),
        DiscModel(2.0, 0.3),
        Tabulated((0.0, 1.0, 2.0), (1.0, 0.5, 0.1), "exponential"),
    ])
    def test_roundtrip(self, model):
        assert pathloss.from_dict(pathloss.to_dict(model)) == model

    def test_unknown_variant(self):
        with pytest.raises(ConfigError):
            pathloss.from_dict({"variant": "okumura"})

    def test_missing_parameter(self):
        with pytest.raises(ConfigError):
            pathloss.from_dict({"variant": "stretched_exp", "eta": 1.0})
