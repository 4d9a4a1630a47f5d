from dataclasses import replace

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pcsarch.constructor import construct, uniform_random
from pcsarch.domain import total_cost
from pcsarch.feasibility import check
from pcsarch.refine import LsBudget, local_search, replacement_neighbors, substitute

from conftest import t1_tree


def leaf_of(arch, device):
    return next(n for n, node in arch.nodes.items() if node.device == device)


class TestNeighbors:
    def test_full_io8_has_none(self, t1, t1_optimum):
        assert replacement_neighbors(t1_optimum, t1, leaf_of(t1_optimum, "IO8")) == []

    def test_light_io8_can_shrink(self, t1):
        arch = t1_tree(t1, [("IO8", 8), ("IO8", 2)])
        light = [n for n in arch.nodes if n != arch.root and len(arch.signals_on(n)) == 2][0]
        assert replacement_neighbors(arch, t1, light) == ["IO4"]

    def test_root_has_no_alternative(self, t1, t1_optimum):
        assert replacement_neighbors(t1_optimum, t1, t1_optimum.root) == []

    def test_single_type_catalog(self, t1):
        inst = replace(t1, devices=(t1.device["P1"], t1.device["IO8"]))
        arch = t1_tree(inst, [("IO8", 8), ("IO8", 2)])
        assert all(replacement_neighbors(arch, inst, n) == [] for n in arch.nodes)

    def test_max_cost_filter(self, t1):
        arch = t1_tree(t1, [("IO4", 4), ("IO4", 4), ("IO4", 2)])
        leaf = leaf_of(arch, "IO4")
        assert replacement_neighbors(arch, t1, leaf) == ["IO8"]
        assert replacement_neighbors(arch, t1, leaf, max_cost=6.0) == []

    def test_unknown_node(self, t1, t1_optimum):
        with pytest.raises(KeyError):
            replacement_neighbors(t1_optimum, t1, "nope")

    def test_substitute_leaves_input_untouched(self, t1, t1_optimum):
        node = leaf_of(t1_optimum, "IO8")
        out = substitute(t1_optimum, t1, node, "IO4")
        assert t1_optimum.nodes[node].device == "IO8"
        assert out.nodes[node].device == "IO4"


class TestLocalSearch:
    def test_saves_exactly_four(self, t1):
        arch = t1_tree(t1, [("IO8", 8), ("IO8", 2)])
        assert total_cost(arch, t1) == 120
        out = local_search(arch, t1)
        assert total_cost(out, t1) == 116
        assert out.device_multiset() == {"P1": 1, "IO8": 1, "IO4": 1}
        assert total_cost(arch, t1) == 120

    def test_optimum_is_fixed_point(self, t1, t1_optimum):
        out = local_search(t1_optimum, t1)
        assert total_cost(out, t1) == 116
        assert out.device_multiset() == t1_optimum.device_multiset()

    def test_infeasible_input(self, t1):
        arch = t1_tree(t1, [("IO8", 8)])
        with pytest.raises(ValueError):
            local_search(arch, t1)

    @pytest.mark.parametrize("kw", [dict(max_passes=0), dict(max_stall_passes=0)])
    def test_bad_budget(self, kw):
        with pytest.raises(ValueError):
            LsBudget(**kw)

    @settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(st.integers(0, 10_000))
    def test_monotone_feasible_idempotent(self, t1, seed):
        out = construct(t1, uniform_random, seed)
        if not out.complete:
            return
        arch = out.architecture
        once = local_search(arch, t1, LsBudget(seed=seed))
        assert check(once, t1).feasible
        assert total_cost(once, t1) <= total_cost(arch, t1)
        twice = local_search(once, t1, LsBudget(seed=seed + 1))
        assert total_cost(twice, t1) == total_cost(once, t1)
