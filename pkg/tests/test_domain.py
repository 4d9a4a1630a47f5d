import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsarch.domain import (
    DanglingReferenceError,
    DuplicateIdError,
    ParseError,
    UnknownDeviceError,
    dump_architecture,
    dump_instance,
    instance_to_dict,
    load_architecture,
    load_instance,
    total_cost,
    validate_instance,
)
from pcsarch.oracle import random_tiny_instance

from conftest import t1_tree


def t1_doc(t1):
    return instance_to_dict(t1)


class TestLoadInstance:
    def test_t1_shape(self, t1):
        assert len(t1.devices) == 3
        assert len(t1.signals) == 10
        assert t1.levels == 2
        assert t1.scan_deadline is None
        assert t1.min_availability == 0.0
        assert validate_instance(t1) == []

    def test_defaults(self, t1):
        doc = t1_doc(t1)
        for key in ("failure_prob", "delay", "memory", "instr_time"):
            del doc["devices"][1][key]
        inst = load_instance(doc)
        io8 = inst.device["IO8"]
        assert io8.failure_prob == 0.0
        assert io8.delay == 0.0
        assert io8.memory is None
        assert io8.instr_time == 0.0

    def test_missing_capacity_entries_are_zero(self, t1):
        doc = t1_doc(t1)
        doc["devices"][1]["child_capacity"] = {}
        assert load_instance(doc).device["IO8"].child_capacity == {"F1": 0}

    def test_dangling_room(self, t1):
        doc = t1_doc(t1)
        doc["signals"][3]["room"] = "H9"
        with pytest.raises(DanglingReferenceError) as err:
            load_instance(doc)
        assert err.value.ref == "H9"
        assert "H9" in str(err.value)

    @pytest.mark.parametrize("mutate, ref", [
        (lambda d: d["signals"][0].update(type="XX"), "XX"),
        (lambda d: d["devices"][0].update(upper_interface="F7"), "F7"),
        (lambda d: d["devices"][1]["channel_capacity"].update(DO=3), "DO"),
    ])
    def test_other_dangling(self, t1, mutate, ref):
        doc = t1_doc(t1)
        mutate(doc)
        with pytest.raises(DanglingReferenceError, match=ref):
            load_instance(doc)

    def test_duplicate_ids(self, t1):
        doc = t1_doc(t1)
        doc["devices"][2]["id"] = "IO8"
        with pytest.raises(DuplicateIdError, match="IO8"):
            load_instance(doc)

    def test_parse_error_has_location(self):
        with pytest.raises(ParseError) as err:
            load_instance('{"levels": 2,\n "interfaces": [}')
        assert "line 2" in err.value.location

    def test_schema_error_has_path(self, t1):
        doc = t1_doc(t1)
        doc["devices"][1]["cost"] = "cheap"
        with pytest.raises(ParseError, match=r"devices\[1\]\.cost"):
            load_instance(doc)

    def test_round_trip(self, t1, case_study):
        for inst in (t1, case_study):
            assert load_instance(dump_instance(inst)) == inst


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_random(seed):
    inst = random_tiny_instance(seed)
    again = load_instance(json.loads(dump_instance(inst)))
    assert again == inst


class TestValidate:
    def test_fixtures_clean(self, t1, case_study):
        assert validate_instance(t1) == []
        assert validate_instance(case_study) == []

    def test_levels(self, t1):
        assert "levels must be >= 2" in validate_instance(replace(t1, levels=1))

    def test_no_processor(self, t1):
        devices = tuple(d for d in t1.devices if not d.is_processor)
        assert "no processor available" in validate_instance(replace(t1, devices=devices))

    def test_no_leaf_type_is_well_formed(self, t1):
        # unsolvable, but that is the solver's verdict to report
        devices = tuple(d for d in t1.devices if d.is_processor)
        assert validate_instance(replace(t1, devices=devices)) == []


class TestTotalCost:
    def test_optimum(self, t1, t1_optimum):
        assert total_cost(t1_optimum, t1) == 116

    def test_trunk_only(self, t1):
        assert total_cost(t1_tree(t1, [("IO4", 0)]), t1) == 106

    def test_two_io8(self, t1):
        assert total_cost(t1_tree(t1, [("IO8", 8), ("IO8", 2)]), t1) == 120

    def test_unknown_device(self, t1, t1_optimum):
        t1_optimum.replace_device("n1", "IO99")
        with pytest.raises(UnknownDeviceError):
            total_cost(t1_optimum, t1)

    @given(st.permutations(["IO8", "IO4", "IO4", "IO8", "IO8"]))
    def test_additive_and_order_free(self, t1, order):
        arch = t1_tree(t1, [(d, 0) for d in order])
        assert total_cost(arch, t1) == 100 + 3 * 10 + 2 * 6


def test_architecture_round_trip(t1, t1_optimum):
    doc = json.loads(dump_architecture(t1_optimum, t1))
    assert doc["cost"] == 116
    again = load_architecture(doc)
    assert again.nodes == t1_optimum.nodes
    assert again.parent == t1_optimum.parent
    assert again.connections == t1_optimum.connections
    assert again.processing == t1_optimum.processing
    assert again.children("n0") == ["n1", "n2"]
