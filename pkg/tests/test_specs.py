import pytest

from attacksynth.automaton import Automaton, contains, is_trim
from attacksynth.errors import ModelIncorrect, PlantIsTrim
from attacksynth.protocols import abp
from attacksynth.specs import (Kind, PropertyKind, abp_liveness_monitor, abp_safety_monitor,
                               blocking_marking, build_liveness_spec_from_deadlocks,
                               build_safety_spec, tcp_tm1_monitor, validate_nominal)


def test_safety_monitor_flags_out_of_order():
    m = abp_safety_monitor(1)
    assert not contains(m, ("send", "deliver", "send", "deliver"))[1]
    assert contains(m, ("send", "send"))[1]
    assert contains(m, ("deliver",))[1]


def test_second_safety_monitor():
    m = abp_safety_monitor(2)
    assert not contains(m, ("deliver", "done"))[1]
    assert contains(m, ("done",))[1]
    with pytest.raises(ValueError):
        abp_safety_monitor(3)


def test_liveness_monitor_marks_waiting():
    m = abp_liveness_monitor()
    assert contains(m, ("send",))[1]
    assert contains(m, ("send", "send"))[1]
    assert not contains(m, ("send", "deliver"))[1]


def test_property_kind_needs_marked_monitor():
    unmarked = Automaton(["q"], {"a"}, [], "q")
    with pytest.raises(ValueError):
        PropertyKind.safety(unmarked)
    assert PropertyKind.liveness().kind is Kind.LIVENESS_FROM_DEADLOCKS
    assert PropertyKind.liveness(abp_liveness_monitor()).kind is Kind.LIVENESS_DEDICATED


def test_tm1_monitor_marks_inconsistent_state():
    m = tcp_tm1_monitor(channel_free=True)
    # B completes a passive open while A never left closed
    bad = ("listen_B", "SYN_NB", "SYN_ACK_BN", "ACK_NB")
    assert contains(m, bad)[1]
    assert not contains(m, ())[1]


def test_safety_spec_marks_violations_only():
    g_other = abp.nominal_plant(False)
    h = build_safety_spec(g_other, abp_safety_monitor(1))
    # nominal ABP never violates, so there is nothing to mark
    assert h.is_empty()


def test_validate_nominal_safety():
    g = abp.nominal_plant(True)
    assert validate_nominal(PropertyKind.safety(abp_safety_monitor(1)), g)
    broken = Automaton([0, 1], {"send", "deliver"}, [(0, "deliver", 1)], 0, [0, 1])
    with pytest.raises(ModelIncorrect) as info:
        validate_nominal(PropertyKind.safety(abp_safety_monitor(1)), broken)
    assert "deliver" in str(info.value)


def test_validate_nominal_liveness():
    assert validate_nominal(PropertyKind.liveness(), abp.nominal_plant(False))
    stuck = Automaton([0, 1], {"a"}, [(0, "a", 1)], 0, [0])
    with pytest.raises(ModelIncorrect) as info:
        validate_nominal(PropertyKind.liveness(), stuck)
    assert info.value.witness == 1


def test_liveness_spec_from_deadlocks():
    g = Automaton(range(4), {"a", "b", "c"},
                  [(0, "a", 1), (0, "b", 2), (2, "c", 2), (1, "c", 0)], 0, [0])
    assert blocking_marking(g) == {2}
    h = build_liveness_spec_from_deadlocks(g)
    assert h.marked == {2}
    assert is_trim(h)
    with pytest.raises(PlantIsTrim):
        build_liveness_spec_from_deadlocks(abp.nominal_plant(False))
