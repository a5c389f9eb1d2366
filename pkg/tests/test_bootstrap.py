import itertools
from math import comb

import numpy as np
import pytest

from motifboot.bootstrap import (CONSTANT_ONE, MultiplierSpec, _weight_matrix,
                                 baseline_eg, baseline_ss, draw_weights, ecdf,
                                 elementary_symmetric, mb_linear,
                                 mb_multiplicative, mb_quadratic)
from motifboot.counts import LocalStats, count_exact
from motifboot.graphs import Graph
from motifboot.motifs import TRIANGLE

from conftest import complete, gnp

ONES = MultiplierSpec(seed=0, distribution=CONSTANT_ONE)


@pytest.fixture(scope="module")
def g60_stats():
    g = gnp(60, 0.5, seed=21)
    return count_exact(g, TRIANGLE, want_pairwise=True, want_instances=True)


class TestWeights:
    def test_deterministic_in_seed_and_replicate(self):
        spec = MultiplierSpec(seed=99)
        a = draw_weights(50, spec, 3)
        b = draw_weights(50, spec, 3)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, draw_weights(50, spec, 4))
        assert not np.array_equal(a, draw_weights(50, MultiplierSpec(seed=98),
                                                  3))

    def test_matrix_rows_equal_single_draws(self):
        spec = MultiplierSpec(seed=5)
        W = _weight_matrix(12, spec, 8)
        for j in range(8):
            assert np.array_equal(W[j], draw_weights(12, spec, j))

    def test_constant_one_hook(self):
        assert np.all(draw_weights(10, ONES, 0) == 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            MultiplierSpec(seed=0, distribution="cauchy")
        with pytest.raises(ValueError):
            draw_weights(0, MultiplierSpec(seed=0), 0)
        with pytest.raises(ValueError):
            _weight_matrix(5, MultiplierSpec(seed=0), 0)


class TestDegenerateScale:
    def test_k4_triangle_errors(self):
        stats = count_exact(complete(4), TRIANGLE, want_pairwise=True,
                            want_instances=True)
        assert stats.tau_hat == 0.0
        for proc in (mb_linear, mb_quadratic, mb_multiplicative):
            with pytest.raises(ValueError, match="degenerate"):
                proc(stats, MultiplierSpec(seed=1), 10)

    def test_empty_graph_errors(self):
        # every replicate of the reweighted statistic would be 0, but the
        # standardizing scale is 0 too, so this is rejected explicitly
        g = Graph(np.zeros((8, 8), dtype=bool))
        stats = count_exact(g, TRIANGLE, want_pairwise=True,
                            want_instances=True)
        with pytest.raises(ValueError, match="degenerate"):
            mb_multiplicative(stats, MultiplierSpec(seed=1), 10)


class TestLinear:
    def test_unit_weights_give_zero_replicates(self, g60_stats):
        run = mb_linear(g60_stats, ONES, 20)
        assert np.all(run.replicates == 0.0)

    def test_replicate_formula(self, g60_stats):
        spec = MultiplierSpec(seed=42)
        run = mb_linear(g60_stats, spec, 16)
        n, r = g60_stats.n, 3
        for j in [0, 7, 15]:
            w = draw_weights(n, spec, j)
            shift = (r / n) * ((w - 1.0) @ g60_stats.g1)
            expected = shift / g60_stats.sigma_hat()
            assert run.replicates[j] == pytest.approx(expected, rel=1e-12)

    def test_replicate_mean_small(self, g60_stats):
        run = mb_linear(g60_stats, MultiplierSpec(seed=7), 50_000)
        # E(xi) = 1, so standardized replicates have mean 0 and variance
        # close to 1; the MC error of the mean is ~ 1/sqrt(B)
        assert abs(run.replicates.mean()) <= 4.0 / np.sqrt(50_000)

    def test_method_tag_tracks_provenance(self, g60_stats):
        assert mb_linear(g60_stats, ONES, 5).method == "MB_L"
        sketched = LocalStats(motif=TRIANGLE, n=g60_stats.n,
                              t_hat=g60_stats.t_hat, h1=g60_stats.h1,
                              provenance="sketched")
        assert mb_linear(sketched, ONES, 5).method == "MB_L_APX"


class TestQuadratic:
    def test_unit_weights_give_zero_replicates(self, g60_stats):
        run = mb_quadratic(g60_stats, ONES, 20)
        assert np.all(run.replicates == 0.0)

    def test_zero_pair_table_reduces_to_linear(self):
        g = gnp(30, 0.5, seed=4)
        base = count_exact(g, TRIANGLE, want_pairwise=True)
        flat = LocalStats(motif=TRIANGLE, n=30, t_hat=base.t_hat,
                          h1=base.h1, h2=np.full((30, 30), base.t_hat))
        assert np.allclose(flat.g2_tilde, 0.0)
        spec = MultiplierSpec(seed=9)
        lin = mb_linear(base, spec, 64)
        quad = mb_quadratic(flat, spec, 64)
        assert np.allclose(lin.replicates, quad.replicates)

    def test_coupling_with_linear(self, g60_stats):
        # under shared streams, MB-Q(j) = MB-L(j) + explicit quadratic term
        spec = MultiplierSpec(seed=3)
        lin = mb_linear(g60_stats, spec, 32)
        quad = mb_quadratic(g60_stats, spec, 32)
        n, r = g60_stats.n, 3
        g2t = g60_stats.g2_tilde
        scale = g60_stats.sigma_hat()
        for j in [0, 13, 31]:
            u = draw_weights(n, spec, j) - 1.0
            extra = (r * (r - 1) / (n * (n - 1))) * 0.5 * (u @ g2t @ u)
            assert quad.replicates[j] == pytest.approx(
                lin.replicates[j] + extra / scale, rel=1e-10, abs=1e-12)

    def test_requires_exact_pairwise(self, g60_stats):
        sketched = LocalStats(motif=TRIANGLE, n=g60_stats.n,
                              t_hat=g60_stats.t_hat, h1=g60_stats.h1,
                              provenance="sketched")
        with pytest.raises(ValueError):
            mb_quadratic(sketched, ONES, 5)
        no_table = count_exact(gnp(20, 0.5, seed=1), TRIANGLE,
                               want_pairwise=False)
        with pytest.raises(ValueError):
            mb_quadratic(no_table, ONES, 5)


class TestMultiplicative:
    def test_elementary_symmetric_vs_enumeration(self):
        rng = np.random.default_rng(17)
        for n in (5, 8, 12):
            w = rng.uniform(0.2, 2.0, size=n)
            for r in (2, 3, 4):
                direct = sum(np.prod([w[i] for i in s])
                             for s in itertools.combinations(range(n), r))
                assert elementary_symmetric(w, r) == pytest.approx(
                    direct, rel=1e-12)

    def test_unit_weights_fix_point(self, g60_stats):
        assert elementary_symmetric(np.ones(20), 3) == pytest.approx(
            comb(20, 3), rel=1e-14)
        run = mb_multiplicative(g60_stats, ONES, 10)
        assert np.all(run.replicates == 0.0)  # T* = T_hat exactly

    def test_replicate_formula(self):
        g = gnp(10, 0.5, seed=2)
        stats = count_exact(g, TRIANGLE, want_pairwise=False,
                            want_instances=True)
        spec = MultiplierSpec(seed=30)
        run = mb_multiplicative(stats, spec, 4)
        for j in range(4):
            w = draw_weights(10, spec, j)
            matched = sum(np.prod(w[list(s)]) for s in stats.instances)
            e_r = elementary_symmetric(w, 3)
            t_star = stats.t_hat + (matched - stats.t_hat * e_r) / comb(10, 3)
            expected = (t_star - stats.t_hat) / stats.sigma_hat()
            assert run.replicates[j] == pytest.approx(expected, rel=1e-10)

    def test_requires_instances(self):
        stats = count_exact(gnp(15, 0.5, seed=6), TRIANGLE,
                            want_pairwise=True)
        with pytest.raises(ValueError):
            mb_multiplicative(stats, ONES, 5)


class TestEcdf:
    def _run(self, replicates):
        return type("R", (), {"replicates": np.asarray(replicates,
                                                       dtype=float),
                              "B": len(replicates)})()

    def test_direct_count(self):
        run = self._run([-1.0, 0.0, 0.0, 2.0])
        assert ecdf(run, [0.0]) == pytest.approx([0.75])

    def test_range_endpoints(self):
        run = self._run([-1.0, 0.0, 0.0, 2.0])
        assert ecdf(run, [-5.0]) == pytest.approx([0.0])
        assert ecdf(run, [5.0]) == pytest.approx([1.0])

    def test_monotone_in_unit_interval(self, g60_stats):
        run = mb_linear(g60_stats, MultiplierSpec(seed=11), 500)
        grid = np.linspace(-4, 4, 81)
        vals = ecdf(run, grid)
        assert (np.diff(vals) >= 0).all()
        assert vals.min() >= 0.0 and vals.max() <= 1.0


class TestBaselines:
    def test_eg_deterministic(self):
        g = gnp(40, 0.5, seed=8)
        a = baseline_eg(g, TRIANGLE, B=20, seed=5)
        b = baseline_eg(g, TRIANGLE, B=20, seed=5)
        assert np.array_equal(a.replicates, b.replicates)
        assert a.method == "EG"

    def test_ss_subsample_size_validation(self):
        g = gnp(40, 0.5, seed=8)
        for b in (3, 40, 41):
            with pytest.raises(ValueError):
                baseline_ss(g, TRIANGLE, b=b, B=10, seed=0)

    def test_ss_on_complete_graph_hits_degenerate_scale(self):
        # every subsample of K6 has triangle density 1, and the full-graph
        # tau_hat is 0, so the scale check fires before any resampling
        with pytest.raises(ValueError, match="degenerate"):
            baseline_ss(complete(6), TRIANGLE, b=5, B=10, seed=0)

    def test_ss_scale_adjustment(self):
        g = gnp(40, 0.5, seed=8)
        stats = count_exact(g, TRIANGLE, want_pairwise=False)
        run = baseline_ss(g, TRIANGLE, b=20, B=10, seed=1, stats=stats)
        assert run.scale == pytest.approx(
            stats.sigma_hat() * np.sqrt(40 / 20))

    def test_ss_close_to_mbl(self):
        g = gnp(300, 0.5, seed=33)
        stats = count_exact(g, TRIANGLE, want_pairwise=False)
        mbl = mb_linear(stats, MultiplierSpec(seed=1), 2000)
        ss = baseline_ss(g, TRIANGLE, b=150, B=2000, seed=2, stats=stats)
        grid = np.round(np.arange(-30, 31) / 10.0, 1)
        sup = np.abs(ecdf(mbl, grid) - ecdf(ss, grid)).max()
        assert sup <= 0.08


class TestQuantile:
    def test_inverse_ecdf_convention(self, g60_stats):
        run = mb_linear(g60_stats, MultiplierSpec(seed=13), 200)
        srt = np.sort(run.replicates)
        assert run.quantile(0.5) == srt[99]   # ceil(0.5 * 200) - 1
        assert run.quantile(0.005) == srt[0]
        assert run.quantile(1.0) == srt[-1]
