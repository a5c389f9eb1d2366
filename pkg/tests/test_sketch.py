import numpy as np
import pytest

from motifboot.counts import count_exact
from motifboot.graphs import Graph
from motifboot.motifs import EDGE, TRIANGLE, from_bitstring
from motifboot.sketch import (SketchPlan, default_n_perms, sketch_local,
                              sketch_subset_baseline)

from conftest import complete, gnp


class TestPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            SketchPlan(n_perms=0, seed=1)
        with pytest.raises(ValueError):
            SketchPlan(n_perms=5, seed=1, strategy="quantum")

    def test_default_budget(self):
        assert default_n_perms(200) == int(np.ceil(50 * np.log(200)))

    def test_work_budget_equal_between_strategies(self):
        plan = SketchPlan(n_perms=10, seed=0)
        # both strategies evaluate the indicator n * N * floor((n-1)/(r-1))
        # times; the baseline draws that many subsets directly
        assert plan.work_budget(50, 3) == 50 * 10 * 24

    def test_leftover_accounting(self):
        plan = SketchPlan(n_perms=4, seed=0)
        for n, r in [(50, 3), (51, 3), (10, 4), (11, 4)]:
            nb = plan.blocks_per_pass(n, r)
            assert nb == (n - 1) // (r - 1)
            assert plan.leftovers(n, r) == (n - 1) - nb * (r - 1)
            assert 0 <= plan.leftovers(n, r) < r - 1


class TestExactCases:
    def test_k4_triangle_all_ones(self):
        stats = sketch_local(complete(4), TRIANGLE,
                             SketchPlan(n_perms=3, seed=7))
        assert np.all(stats.h1 == 1.0)
        assert stats.t_hat == 1.0
        assert stats.provenance == "sketched"

    def test_empty_graph_all_zero(self):
        g = Graph(np.zeros((10, 10), dtype=bool))
        stats = sketch_local(g, TRIANGLE, SketchPlan(n_perms=5, seed=1))
        assert np.all(stats.h1 == 0.0)
        assert stats.t_hat == 0.0
        assert stats.tau_hat == 0.0

    def test_r2_shortcut_is_exact(self):
        g = gnp(30, 0.4, seed=2)
        sk = sketch_local(g, EDGE, SketchPlan(n_perms=1, seed=0))
        ex = count_exact(g, EDGE, want_pairwise=False)
        assert np.allclose(sk.h1, ex.h1)
        assert sk.t_hat == pytest.approx(ex.t_hat)

    def test_r2_nonedge_pattern(self):
        g = gnp(20, 0.3, seed=4)
        nonedge = from_bitstring("0")
        sk = sketch_local(g, nonedge, SketchPlan(n_perms=1, seed=0))
        assert np.allclose(sk.h1, ((20 - 1) - g.degrees) / (20 - 1))


class TestDeterminism:
    def test_same_plan_same_output(self):
        g = gnp(40, 0.4, seed=5)
        plan = SketchPlan(n_perms=12, seed=99)
        a = sketch_local(g, TRIANGLE, plan)
        b = sketch_local(g, TRIANGLE, plan)
        assert np.array_equal(a.h1, b.h1)
        c = sketch_local(g, TRIANGLE, SketchPlan(n_perms=12, seed=100))
        assert not np.array_equal(a.h1, c.h1)

    def test_baseline_deterministic(self):
        g = gnp(40, 0.4, seed=5)
        plan = SketchPlan(n_perms=6, seed=3)
        a = sketch_subset_baseline(g, TRIANGLE, plan)
        b = sketch_subset_baseline(g, TRIANGLE, plan)
        assert np.array_equal(a.h1, b.h1)


class TestUnbiasedness:
    @pytest.mark.parametrize("sketcher", [sketch_local,
                                          sketch_subset_baseline])
    def test_mean_over_seeds_near_exact(self, sketcher):
        g = gnp(30, 0.5, seed=12)
        exact = count_exact(g, TRIANGLE, want_pairwise=False)
        n_seeds = 100
        draws = np.stack([
            sketcher(g, TRIANGLE, SketchPlan(n_perms=20, seed=s)).h1
            for s in range(n_seeds)])
        mean = draws.mean(axis=0)
        se = draws.std(axis=0, ddof=1) / np.sqrt(n_seeds)
        # exact vertices (h1 constant over seeds) have se = 0 and match
        gap = np.abs(mean - exact.h1)
        assert np.all(gap <= 4.0 * se + 1e-12)


class TestGuards:
    def test_n_must_exceed_r(self):
        g = Graph(np.zeros((3, 3), dtype=bool))
        with pytest.raises(ValueError):
            sketch_local(g, TRIANGLE, SketchPlan(n_perms=2, seed=0))
        with pytest.raises(ValueError):
            sketch_subset_baseline(g, TRIANGLE, SketchPlan(n_perms=2, seed=0))
