import math

import numpy as np
import pytest

from densecell.montecarlo.engine import DensityRecord, SweepResult
from densecell.montecarlo.experiments import (
    CONSTANT,
    LINEAR,
    Lemma1Record,
    conjecture_checks,
    corollary2_checks,
    decade_ratio,
    lemma1_checks,
    mp_edge_mean,
    run_experiment,
    top_span,
    verify_lemma1,
)
from densecell.pathloss import DiscModel


def _result(lams, sinr, n_r=None, law=LINEAR.label):
    recs = []
    for i, (lam, s) in enumerate(zip(lams, sinr)):
        n = math.ceil(lam)
        nr = n if n_r is None else n_r[i]
        ase = lam * math.log2(1 + s)
        recs.append(DensityRecord(law, lam, n, nr, s, (0.99 * s, 1.01 * s), ase, (ase, ase),
                                  lam * s / n, (0, 0), 0, 100))
    return SweepResult(recs)


class TestHelpers:
    def test_top_span(self):
        assert top_span([1, 10, 100, 1000], 2) == [1, 2, 3]
        assert top_span([100, 215.4, 464.2, 1000], 1) == [0, 1, 2, 3]

    def test_decade_ratio_exact_decade(self):
        assert decade_ratio([1, 10, 100], [1.0, 3.0, 30.0]) == pytest.approx(10.0)

    def test_decade_ratio_rescales(self):
        # y = lambda^1 on a half-decade step still reports a factor of 10 per decade
        lams = [1.0, 10**0.5, 10.0]
        assert decade_ratio(lams, lams) == pytest.approx(10.0)

    def test_decade_ratio_none_when_grid_too_short(self):
        assert decade_ratio([1.0, 1.5], [1.0, 2.0]) is None


class TestChecks:
    def test_lemma1_decreasing_gap(self):
        recs = [Lemma1Record(1, 0.90, 0.001, 1.0), Lemma1Record(10, 0.97, 0.001, 1.0),
                Lemma1Record(100, 0.99, 0.001, 1.0)]
        assert all(c.passed for c in lemma1_checks(recs))

    def test_lemma1_growing_gap_fails(self):
        recs = [Lemma1Record(1, 0.99, 0.001, 1.0), Lemma1Record(10, 0.90, 0.001, 1.0)]
        checks = lemma1_checks(recs)
        assert not checks[0].passed and not checks[1].passed

    def test_conjecture_flat(self):
        lams = [100, 215.4, 464.2, 1000]
        res = _result(lams, [0.03, 0.032, 0.034, 0.035])
        rep = conjecture_checks(res)
        assert rep.passed

    def test_conjecture_upper_trend_not_rejected(self):
        lams = [100, 215.4, 464.2, 1000]
        res = _result(lams, [0.03 * lam / 100 for lam in lams])
        rep = conjecture_checks(res)
        assert not rep.passed

    def test_corollary2(self):
        lams = [100, 215.4, 464.2, 1000]
        res = _result(lams, [0.03, 0.032, 0.034, 0.035])
        assert all(c.passed for c in corollary2_checks(res))


class TestSmallRuns:
    def test_lemma1_disc(self):
        recs = verify_lemma1(DiscModel(1.0, 1.0), [2.0, 20.0], trials=300)
        # E[(1/lam) sum_{i>=1} L g] = 2 pi gamma - E[L(r0)]/lam; here L(r0) = 1 w.h.p.
        for r in recs:
            assert r.mean == pytest.approx(math.pi - (1 - math.exp(-math.pi * r.density)) / r.density,
                                           abs=5 * r.se)

    def test_mp_edge_small(self):
        mean, se = mp_edge_mean(16, samples=50)
        # finite-N mean of the top eigenvalue sits below the (1 + sqrt(y))^2 = 4 edge
        assert 2.5 < mean < 4.0 and se > 0

    def test_unknown(self, small_config):
        with pytest.raises(ValueError):
            run_experiment("lemma2", small_config)
