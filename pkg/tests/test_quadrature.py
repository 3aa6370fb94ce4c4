import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densecell.errors import DivergenceError
from densecell.quadrature import integrate


class TestIntegrate:
    def test_polynomial_exact(self):
        val, err = integrate(lambda x: 3 * x**2, 0.0, 2.0)
        assert val == pytest.approx(8.0, rel=1e-14)
        assert err < 1e-10

    def test_gaussian_half_line(self):
        val, _ = integrate(lambda x: np.exp(-x * x), 0.0, math.inf)
        assert val == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)

    def test_power_tail(self):
        val, _ = integrate(lambda x: x**-3.0, 1.0, math.inf)
        assert val == pytest.approx(0.5, rel=1e-10)

    def test_breakpoint_kink(self):
        f = lambda x: np.where(x < 1.0, 1.0, 0.0)
        val, _ = integrate(f, 0.0, 3.0, points=(1.0,))
        assert val == pytest.approx(1.0, rel=1e-14)

    def test_empty_interval(self):
        assert integrate(np.sin, 2.0, 2.0)[0] == 0.0

    def test_divergent_tail_raises_with_partial(self):
        with pytest.raises(DivergenceError) as info:
            integrate(lambda x: 1.0 / x, 1.0, math.inf, max_intervals=200)
        assert info.value.partial > 0

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 5.0), st.floats(0.3, 2.0))
    def test_stretched_exponential_moment(self, eta, kappa):
        # int_0^inf r exp(-eta r^kappa) dr = Gamma(2/kappa) / (kappa eta^(2/kappa))
        val, _ = integrate(lambda r: r * np.exp(-eta * np.power(r, kappa)), 0.0, math.inf)
        want = math.gamma(2 / kappa) / (kappa * eta ** (2 / kappa))
        assert val == pytest.approx(want, rel=1e-9)
