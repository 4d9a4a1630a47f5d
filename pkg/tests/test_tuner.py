import math
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsarch.aco import TUNED_ALPHA, TUNED_BETA, TUNED_RHO
from pcsarch.tuner import (
    ParetoPoint,
    TunerConfig,
    crowding_distance,
    dominates,
    evaluate_params,
    knee_point,
    nondominated_sort,
    polynomial_mutation,
    sbx_crossover,
    tune,
)

SMALL = dict(population=6, generations=2, eval_runs=2, eval_iterations=4, eval_ants=5)


class TestSorting:
    def test_two_fronts(self):
        assert nondominated_sort([(0, 1), (1, 0), (1, 1)]) == [[0, 1], [2]]

    def test_single(self):
        assert nondominated_sort([(3, 3)]) == [[0]]

    def test_duplicates_share_front(self):
        assert nondominated_sort([(1, 1), (1, 1), (2, 2)]) == [[0, 1], [2]]

    def test_inf_objective(self):
        assert nondominated_sort([(-1, math.inf), (-0.5, 2.0)]) == [[0, 1]]

    @settings(max_examples=100)
    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=20))
    def test_partition_and_ordering(self, pts):
        fronts = nondominated_sort(pts)
        assert sorted(i for f in fronts for i in f) == list(range(len(pts)))
        for f in fronts:
            assert not any(dominates(pts[i], pts[j]) for i in f for j in f)
        for k in range(1, len(fronts)):
            assert all(any(dominates(pts[i], pts[j]) for i in fronts[k - 1]) for j in fronts[k])


class TestCrowding:
    def test_two_points(self):
        assert crowding_distance([(0, 1), (1, 0)]) == [math.inf, math.inf]

    def test_one_point(self):
        assert crowding_distance([(0, 0)]) == [math.inf]

    def test_collinear_middle(self):
        assert crowding_distance([(0, 0), (1, 1), (2, 2)])[1] == pytest.approx(2.0)

    def test_empty(self):
        assert crowding_distance([]) == []


class TestOperators:
    @settings(max_examples=100)
    @given(st.integers(0, 2**32), st.lists(st.floats(0, 1), min_size=6, max_size=6))
    def test_children_in_bounds(self, seed, u):
        bounds = [(0.5, 5.0), (0.5, 5.0), (0.05, 0.95)]
        p1 = [lo + x * (hi - lo) for x, (lo, hi) in zip(u[:3], bounds)]
        p2 = [lo + x * (hi - lo) for x, (lo, hi) in zip(u[3:], bounds)]
        rng = random.Random(seed)
        for c in sbx_crossover(p1, p2, bounds, 15.0, rng):
            m = polynomial_mutation(c, bounds, 20.0, 1.0, rng)
            assert all(lo <= v <= hi for v, (lo, hi) in zip(c + m, bounds + bounds))

    def test_collapsed_bounds_fixed(self):
        bounds = [(2.0, 2.0)]
        rng = random.Random(0)
        assert sbx_crossover([2.0], [2.0], bounds, 15.0, rng) == ([2.0], [2.0])
        assert polynomial_mutation([2.0], bounds, 20.0, 1.0, rng) == [2.0]


class TestConfig:
    @pytest.mark.parametrize("kw", [
        dict(population=5), dict(population=2), dict(eval_runs=1), dict(generations=-1),
        dict(rho_bounds=(0.0, 0.5)), dict(rho_bounds=(0.5, 1.0)), dict(alpha_bounds=(3.0, 1.0)),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            TunerConfig(**kw)

    def test_tuned_triple_inside_defaults(self):
        assert TunerConfig().contains((TUNED_ALPHA, TUNED_BETA, TUNED_RHO))


class TestEvaluate:
    def test_unsatisfiable(self, t1):
        inst = replace(t1, devices=t1.devices[:1])
        p = evaluate_params(inst, 1.0, 1.0, 0.5, TunerConfig(**SMALL))
        assert p.feasibility == 0.0 and p.sigma is None
        assert p.objectives == (-0.0, math.inf)

    def test_equal_seeds_zero_spread(self, t1):
        p = evaluate_params(t1, 1.0, 1.0, 0.5, TunerConfig(**SMALL), seeds=[4, 4, 4])
        assert p.sigma == 0.0

    def test_out_of_bounds(self, t1):
        with pytest.raises(ValueError):
            evaluate_params(t1, 9.0, 1.0, 0.5, TunerConfig(**SMALL))

    def test_tuned_triple(self, t1):
        p = evaluate_params(t1, TUNED_ALPHA, TUNED_BETA, TUNED_RHO, TunerConfig(**SMALL))
        assert 0.0 < p.feasibility <= 1.0


class TestTune:
    def test_front(self, t1):
        cfg = TunerConfig(**SMALL)
        front = tune(t1, cfg)
        assert front
        assert all(cfg.contains(p.params) for p in front)
        assert not any(dominates(a.objectives, b.objectives) for a in front for b in front)
        assert len({p.params for p in front}) == len(front)

    def test_zero_generations(self, t1):
        assert tune(t1, replace(TunerConfig(**SMALL), generations=0))

    def test_collapsed_bounds(self, t1):
        cfg = TunerConfig(**SMALL, alpha_bounds=(2.0, 2.0), beta_bounds=(3.0, 3.0), rho_bounds=(0.5, 0.5))
        front = tune(t1, cfg)
        assert [p.params for p in front] == [(2.0, 3.0, 0.5)]

    def test_reproducible(self, t1):
        cfg = TunerConfig(**SMALL, seed=7)
        assert tune(t1, cfg) == tune(t1, cfg)

    def test_knee(self):
        front = [ParetoPoint(1, 1, 0.5, 0.9, 1.0), ParetoPoint(2, 2, 0.5, 1.0, 5.0)]
        assert knee_point(front).alpha == 2
