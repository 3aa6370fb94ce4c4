import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from densecell.channel import (
    AntennaScalingLaw,
    Regime,
    antennas_at,
    classify_scaling,
    complex_gaussian,
    max_eig_power,
    sample_exp_gains,
    sample_mimo_max_eig,
    sample_miso_gain,
    serving_gain,
)
from densecell.errors import ConfigError, DomainError


class TestScalingLaw:
    def test_counts(self):
        assert antennas_at(AntennaScalingLaw.constant(4), 123.0) == 4
        assert antennas_at(AntennaScalingLaw.power(1, 0.5), 10.0) == 4
        assert antennas_at(AntennaScalingLaw.power(1, 1), 1000.0) == 1000
        assert antennas_at(AntennaScalingLaw.power(1, 1.5), 100.0) == 1000

    def test_rounding_guard(self):
        # 1000**(1/3) is 9.999999999999998 in floating point
        assert antennas_at(AntennaScalingLaw.power(1, 1 / 3), 1000.0) == 10

    def test_power_log(self):
        law = AntennaScalingLaw.power_log(1, 1, 1)
        assert antennas_at(law, 10.0) == math.ceil(10 * math.log(11))

    @pytest.mark.parametrize("law,regime,c", [
        (AntennaScalingLaw.constant(3), Regime.SUBLINEAR, None),
        (AntennaScalingLaw.power(2, 0.5), Regime.SUBLINEAR, None),
        (AntennaScalingLaw.power(2, 1), Regime.LINEAR, 2.0),
        (AntennaScalingLaw.power_log(1, 1, 1), Regime.SUPERLINEAR, None),
        (AntennaScalingLaw.power(1, 1.5), Regime.SUPERLINEAR, None),
    ])
    def test_classify(self, law, regime, c):
        cls = classify_scaling(law)
        assert cls.regime is regime
        assert cls.c == c

    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            AntennaScalingLaw.power(0, 1)
        with pytest.raises(DomainError):
            AntennaScalingLaw.constant(0)
        with pytest.raises(DomainError):
            AntennaScalingLaw.power_log(1, 1, -1)

    def test_dict_roundtrip(self):
        for law in (AntennaScalingLaw.constant(2), AntennaScalingLaw.power(1, 0.5),
                    AntennaScalingLaw.power_log(2, 1, 0.5)):
            assert AntennaScalingLaw.from_dict(law.to_dict()) == law

    def test_from_dict_unknown(self):
        with pytest.raises(ConfigError):
            AntennaScalingLaw.from_dict({"form": "exp"})

    @settings(max_examples=60)
    @given(st.floats(0.1, 5), st.floats(0.1, 2), st.floats(0.01, 1e4), st.floats(1.0, 10.0))
    def test_monotone_in_density(self, c, p, lam, k):
        law = AntennaScalingLaw.power(c, p)
        assert antennas_at(law, lam) <= antennas_at(law, lam * k)
        assert antennas_at(law, lam) >= 1


class TestGains:
    def test_exp_gains_unit_mean(self, rng):
        g = sample_exp_gains(200_000, rng)
        assert g.mean() == pytest.approx(1.0, abs=0.01)

    def test_complex_gaussian_variance(self, rng):
        z = complex_gaussian((100_000,), rng)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
        assert np.var(z.real) == pytest.approx(0.5, abs=0.01)

    def test_miso_gain_is_gamma(self, rng):
        g = [sample_miso_gain(5, rng) for _ in range(5000)]
        assert stats.kstest(g, stats.gamma(5).cdf).pvalue > 1e-3

    def test_mimo_mean_rank_one(self, rng):
        # n_r = 1: |h|^2 ~ Gamma(n_t, 1) with mean n_t
        g = [sample_mimo_max_eig(6, 1, rng) for _ in range(5000)]
        assert np.mean(g) == pytest.approx(6.0, rel=0.03)

    def test_mimo_two_by_two_mean(self, rng):
        # E[lambda_max] of a 2x2 complex Wishart matrix with 2 degrees of freedom is 7/2
        g = [sample_mimo_max_eig(2, 2, rng) for _ in range(40_000)]
        assert np.mean(g) == pytest.approx(3.5, rel=0.01)

    def test_mimo_rejects_nr_above_nt(self, rng):
        with pytest.raises(DomainError):
            sample_mimo_max_eig(2, 3, rng)

    def test_serving_gain_dispatch(self):
        a = serving_gain("miso", 4, 1, np.random.default_rng(1))
        b = sample_miso_gain(4, np.random.default_rng(1))
        assert a == b


class TestPowerIteration:
    def test_matches_eigvalsh(self, rng):
        for n in (2, 5, 8, 16, 40):
            h = complex_gaussian((n, n + 3), rng)
            gram = h @ h.conj().T
            got = max_eig_power(gram, complex_gaussian(n, rng))
            want = np.linalg.eigvalsh(gram)[-1]
            assert got == pytest.approx(want, rel=1e-8)

    def test_nearly_orthogonal_start(self):
        gram = np.diag([1.0, 5.0, 2.0]).astype(complex)
        start = np.array([1.0, 1e-9, 0.0], dtype=complex)
        assert max_eig_power(gram, start) == pytest.approx(5.0, rel=1e-10)

    def test_close_top_eigenvalues(self):
        # contraction 0.999 per step: slow, but the extrapolated stop keeps accuracy
        gram = np.diag([1.0, 0.999, 0.5]).astype(complex)
        start = np.array([0.1, 1.0, 1.0], dtype=complex)
        assert max_eig_power(gram, start) == pytest.approx(1.0, rel=1e-8)

    def test_scalar(self):
        assert max_eig_power(np.array([[3.0 + 0j]]), np.ones(1)) == 3.0

    def test_large_matches_dense(self, rng):
        h = complex_gaussian((128, 128), rng)
        gram = h @ h.conj().T
        got = max_eig_power(gram, complex_gaussian(128, rng))
        assert got == pytest.approx(np.linalg.eigvalsh(gram)[-1], rel=1e-8)
