from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsarch.constructor import construct, uniform_random
from pcsarch.domain import Architecture, UnknownDeviceError
from pcsarch.feasibility import (
    CONSTRAINTS,
    admissible_child_types,
    check,
    free_channels,
    free_child_slots,
)

from conftest import t1_tree


def failing(report):
    return set(report.failures())


class TestCheck:
    def test_optimum_passes(self, t1, t1_optimum):
        report = check(t1_optimum, t1)
        assert report.feasible
        assert [r["status"] for r in report.to_rows()] == ["pass"] * len(CONSTRAINTS)

    def test_channel_overflow(self, t1):
        arch = t1_tree(t1, [("IO8", 9), ("IO4", 1)])
        report = check(arch, t1)
        assert failing(report) == {"channel_capacity"}
        assert report.offenders["channel_capacity"] == ["n1"]

    def test_child_overflow(self, t1):
        arch = t1_tree(t1, [("IO4", 2)] * 5)
        report = check(arch, t1)
        assert failing(report) == {"child_capacity"}
        assert report.offenders["child_capacity"] == ["n0"]

    def test_incomplete_allocation(self, t1):
        arch = t1_tree(t1, [("IO8", 8)])
        report = check(arch, t1)
        assert failing(report) == {"allocation_completeness"}
        assert sorted(report.offenders["allocation_completeness"]) == ["a09", "a10"]

    def test_signal_on_root(self, t1, t1_optimum):
        t1_optimum.connections["a01"] = "n0"
        assert "leaf_only_connection" in failing(check(t1_optimum, t1))

    def test_processing_not_a_processor(self, t1, t1_optimum):
        t1_optimum.processing["a01"] = "n1"
        assert failing(check(t1_optimum, t1)) == {"processor_coverage"}

    def test_memory(self, t1, t1_optimum):
        p1 = replace(t1.device["P1"], memory=9.0)
        inst = replace(t1, devices=(p1,) + t1.devices[1:])
        assert failing(check(t1_optimum, inst)) == {"memory_capacity"}

    def test_execution_time(self, t1, t1_optimum):
        # 10 instructions * 0.001 ms + one 10 ms hop
        assert check(t1_optimum, replace(t1, scan_deadline=10.01)).feasible
        report = check(t1_optimum, replace(t1, scan_deadline=10.0))
        assert failing(report) == {"execution_time"}

    def test_path_availability(self, t1, t1_optimum):
        io8 = replace(t1.device["IO8"], failure_prob=0.1)
        inst = replace(t1, devices=(t1.devices[0], io8, t1.devices[2]), min_availability=0.95)
        report = check(t1_optimum, inst)
        assert failing(report) == {"path_availability"}
        assert len(report.offenders["path_availability"]) == 8

    def test_room_of_signal(self, t1, t1_optimum):
        t1_optimum.rooms["n2"] = "H2"
        assert failing(check(t1_optimum, t1)) == {"room_consistency"}

    def test_two_roots(self, t1, t1_optimum):
        t1_optimum.add_node("P1", 1)
        assert "tree_shape" in failing(check(t1_optimum, t1))

    def test_childless_internal_node(self, t1):
        arch = Architecture()
        arch.add_node("P1", 1)
        assert "tree_shape" in failing(check(arch, replace(t1, signals=())))

    def test_interface_mismatch(self, case_study):
        arch = Architecture()
        root = arch.add_node("SRV", 1)
        sw = arch.add_node("SW8", 2, root, "H1")
        cu = arch.add_node("CU00062", 3, sw, "H1")
        arch.add_node("DI8", 4, sw, "H1")  # fieldbus module under an Ethernet switch
        arch.add_node("DI8", 4, cu, "H1")
        report = check(arch, replace(case_study, signals=()))
        assert "interface_compatibility" in failing(report)
        assert "tree_shape" in failing(report)  # level 4 under level 2

    def test_unknown_device_raises(self, t1, t1_optimum):
        t1_optimum.replace_device("n2", "IO3")
        with pytest.raises(UnknownDeviceError):
            check(t1_optimum, t1)

    def test_pure(self, t1, t1_optimum):
        assert check(t1_optimum, t1).to_rows() == check(t1_optimum, t1).to_rows()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), drop=st.integers(0, 9))
def test_removing_a_connection_keeps_capacity_verdicts(t1, seed, drop):
    out = construct(t1, uniform_random, seed)
    arch = out.architecture
    before = check(arch, t1)
    sig = t1.signals[drop].id
    del arch.connections[sig]
    del arch.processing[sig]
    after = check(arch, t1)
    for c in ("channel_capacity", "memory_capacity", "execution_time"):
        if before.passed(c):
            assert after.passed(c)


class TestQueries:
    def test_admissible_empty_parent(self, t1):
        arch = Architecture()
        root = arch.add_node("P1", 1)
        assert admissible_child_types(t1, arch, root, 2) == ["IO8", "IO4"]

    def test_admissible_saturated(self, t1):
        arch = t1_tree(t1, [("IO4", 0)] * 4)
        assert admissible_child_types(t1, arch, "n0", 2) == []

    def test_admissible_interface_forced(self, case_study):
        arch = Architecture()
        root = arch.add_node("SRV", 1)
        sw = arch.add_node("SW8", 2, root, "H1")
        cu = arch.add_node("CU00021", 3, sw, "H1")
        for _ in range(10):
            arch.add_node("DI32013", 4, cu, "H1")
        # EtherCAT ports used up; only RS-485 modules remain
        assert admissible_child_types(case_study, arch, cu, 4) == ["AI8", "DI8", "DO4", "AO2"]
        # Ethernet ports under a switch at level 3 (internal): controllers and switches
        assert admissible_child_types(case_study, arch, sw, 3) == ["SRV", "CU00062", "CU00021", "SW8", "SW5"]

    def test_admissible_unknown_parent(self, t1):
        with pytest.raises(KeyError):
            admissible_child_types(t1, Architecture(), "n5", 2)

    def test_admissible_keeps_capacity(self, t1):
        arch = t1_tree(t1, [("IO4", 0)] * 3)
        for u in admissible_child_types(t1, arch, "n0", 2):
            grown = arch.copy()
            grown.add_node(u, 2, "n0", "H1")
            assert check(grown, replace(t1, signals=())).passed("child_capacity")

    def test_free_child_slots(self, t1):
        assert free_child_slots(t1_tree(t1, [("IO4", 0)]), t1) == 3
        assert free_child_slots(Architecture(), t1) == 0
        assert free_child_slots(t1_tree(t1, [("IO4", 0)] * 4), t1) == 0

    def test_free_channels(self, t1):
        trunk = t1_tree(t1, [("IO4", 0)])
        assert free_channels(trunk, t1, "AI") == 4
        assert free_channels(t1_tree(t1, [("IO4", 4)]), t1, "AI") == 0
        root_only = Architecture()
        root_only.add_node("P1", 1)
        assert free_channels(root_only, t1, "AI") == 0
        assert free_channels(trunk, t1, "AI", room="H1") == 4
        assert free_channels(trunk, t1, "AI", room="H2") == 0
