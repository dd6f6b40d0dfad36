import pytest
from hypothesis import given, settings

from oracles import (bounded_language_equal, brute_supcn, is_controllable_bf, is_normal_bf,
                     language)
from strategies import synthesis_instances

from attacksynth.automaton import (Automaton, compose, contains, generated_language_equal,
                                   is_trim, mark_all)
from attacksynth.errors import AlphabetMismatch, EmptySupervisor, PartitionInvalid
from attacksynth.supervisory import (Classification, EventPartition, check_controllability,
                                     check_normality, classify, controlled_behavior,
                                     disablement_needed, realize, relaxed_marked_behavior, supcn)


def blocking_plant():
    # c then an uncontrollable u into a bad state, or a straight to a good one
    return Automaton(range(4), {"a", "c", "u"},
                     [(0, "c", 1), (1, "u", 2), (0, "a", 3)], 0, [2, 3])


def test_partition_validation():
    EventPartition({"a"}, {"a", "b"}).validate({"a", "b"})
    with pytest.raises(PartitionInvalid):
        EventPartition({"a"}, {"b"}).validate({"a", "b"})
    with pytest.raises(PartitionInvalid):
        EventPartition({"z"}, {"z"}).validate({"a"})


def test_partition_complements():
    p = EventPartition({"a"}, {"a", "b"})
    assert p.uncontrollable({"a", "b", "c"}) == {"b", "c"}
    assert p.unobservable({"a", "b", "c"}) == {"c"}


def test_controllable_event_is_disabled():
    g = blocking_plant()
    # spec: a is fine, c.u is not wanted (c allowed but u leaves the spec)
    h = Automaton(range(4), g.events, [(0, "a", 3), (0, "c", 1)], 0, [3])
    p = EventPartition({"c", "a"}, g.events)
    result = supcn(h, g, p)
    s = result.supcn
    assert language(s, 3, True) == {("a",)}
    assert language(s, 3) == {(), ("a",)}
    assert result.disablement_needed
    assert disablement_needed(result, g)


def test_uncontrollable_escape_empties_result():
    g = blocking_plant()
    h = Automaton(range(4), g.events, [(0, "a", 3), (0, "c", 1)], 0, [3])
    # nothing can stop c.u once c is uncontrollable
    assert supcn(h, g, EventPartition({"a"}, g.events)).is_empty
    assert supcn(h, g, EventPartition(set(), g.events)).is_empty
    assert not supcn(h, g, EventPartition({"c"}, g.events)).is_empty


def test_normality_matters():
    # u unobservable: after c the attacker cannot tell u.c from c
    g = Automaton(range(4), {"u", "c"}, [(0, "u", 1), (1, "c", 2), (0, "c", 3)], 0, [2, 3])
    h = Automaton(range(4), g.events, [(0, "u", 1), (1, "c", 2), (0, "c", 3)], 0, [2])
    seen = EventPartition({"c"}, {"u", "c"})
    blind = EventPartition({"c"}, {"c"})
    assert language(supcn(h, g, seen).supcn, 3, True) == {("u", "c")}
    assert supcn(h, g, blind).is_empty


def test_supcn_alphabet_mismatch():
    g = blocking_plant()
    h = Automaton([0], {"a"}, [], 0, [0])
    with pytest.raises(AlphabetMismatch):
        supcn(h, g, EventPartition(set(), set()))


def test_checks_on_known_languages():
    g = blocking_plant()
    only_c = Automaton(range(2), g.events, [(0, "c", 1)], 0, [1])
    ok, witnesses = check_controllability(only_c, g, {"u"})
    assert not ok
    assert witnesses[0] == (("c",), "u")
    assert check_controllability(only_c, g, set())[0]
    assert check_normality(only_c, g, g.events)


def test_classify_three_ways():
    # u reaches the violation, v a deadlock; both uncontrollable
    g = Automaton(range(3), {"u", "v"}, [(0, "u", 1), (0, "v", 2)], 0, [1])
    h = Automaton(range(3), g.events, [(0, "u", 1), (0, "v", 2)], 0, [1])
    p = EventPartition(set(), g.events)
    result = supcn(h, g, p)
    assert result.is_empty
    assert classify(result, h, g, p) is Classification.THERE_EXISTS_ONLY
    relaxed = relaxed_marked_behavior(h, g, p)
    assert contains(relaxed, ("u",)) == (True, True)
    assert contains(relaxed, ("v",)) == (True, False)

    never = Automaton(range(3), g.events, [(0, "u", 1), (0, "v", 2)], 0, [])
    result = supcn(never, g, p)
    assert classify(result, never, g, p) is Classification.NO_ATTACK

    only_u = Automaton(range(2), {"u", "v"}, [(0, "u", 1)], 0, [1])
    ctrl = EventPartition({"v"}, g.events)
    result = supcn(only_u, g, ctrl)
    assert classify(result, only_u, g, ctrl) is Classification.FOR_ALL


def test_realize_empty_raises():
    g = blocking_plant()
    with pytest.raises(EmptySupervisor):
        realize(Automaton.empty(g.events), g, EventPartition(set(), g.events))


def test_realization_of_known_supervisor():
    g = blocking_plant()
    h = Automaton(range(4), g.events, [(0, "a", 3), (0, "c", 1)], 0, [3])
    p = EventPartition({"a", "c"}, g.events)
    s = supcn(h, g, p).supcn
    r = realize(s, g, p)
    assert r.enabled_map[r.automaton.initial] == {"a"}
    closed = controlled_behavior(r, g)
    assert language(closed, 3, True) == {("a",)}


# -- properties --------------------------------------------------------------------

@settings(max_examples=300)
@given(synthesis_instances(acyclic_plant=True))
def test_supcn_matches_bruteforce(inst):
    g, h, p = inst
    s = supcn(h, g, p).supcn
    closed_g = language(g, 5)
    unc = p.uncontrollable(g.events)
    k = language(h, 5, True) & closed_g
    assert language(s, 5, True) == brute_supcn(k, closed_g, unc, p.observable)


@settings(max_examples=300)
@given(synthesis_instances(acyclic_plant=False))
def test_supcn_controllable_normal_and_inside_spec(inst):
    g, h, p = inst
    result = supcn(h, g, p)
    s = result.supcn
    if s.is_empty():
        return
    assert is_trim(s)
    assert s.is_deterministic()
    unc = p.uncontrollable(g.events)
    assert check_controllability(s, g, unc)[0]
    assert check_normality(s, g, p.observable)
    closed_g = language(g, 6)
    got = language(s, 6, True)
    assert got <= language(h, 6, True) & closed_g
    # bounded string checks are sound on prefixes of length <= 5 when u+e fits in 6
    closure = language(s, 5)
    for v in closed_g:
        if v and len(v) <= 6 and v[-1] in unc and v[:-1] in closure:
            assert contains(s, v)[0]
    assert result.disablement_needed == (not generated_language_equal(s, g))


@settings(max_examples=200)
@given(synthesis_instances(acyclic_plant=True))
def test_supcn_monotone_in_partition(inst):
    g, h, p = inst
    base = language(supcn(h, g, p).supcn, 5, True)
    more_ctrl = EventPartition(p.observable, p.observable)
    more_obs = EventPartition(p.controllable, g.events)
    assert base <= language(supcn(h, g, more_ctrl).supcn, 5, True)
    assert base <= language(supcn(h, g, more_obs).supcn, 5, True)


@settings(max_examples=200)
@given(synthesis_instances(acyclic_plant=True))
def test_bruteforce_output_is_controllable_and_normal(inst):
    # sanity of the oracle itself
    g, h, p = inst
    closed_g = language(g, 5)
    unc = p.uncontrollable(g.events)
    k = language(h, 5, True) & closed_g
    out = brute_supcn(k, closed_g, unc, p.observable)
    assert is_controllable_bf(out, closed_g, unc)
    assert is_normal_bf(out, closed_g, p.observable)


@settings(max_examples=200)
@given(synthesis_instances(acyclic_plant=False))
def test_realization_round_trip(inst):
    g, h, p = inst
    s = supcn(h, g, p).supcn
    if s.is_empty():
        return
    r = realize(s, g, p)
    assert set(r.automaton.events) <= p.observable
    assert bounded_language_equal(compose(r.automaton, g), s, 8)
    assert bounded_language_equal(controlled_behavior(r, g), s, 8, marked=True)


@settings(max_examples=200)
@given(synthesis_instances(acyclic_plant=False))
def test_classification_consistent(inst):
    g, h, p = inst
    result = supcn(h, g, p)
    cls = classify(result, h, g, p)
    if not result.is_empty:
        assert cls is Classification.FOR_ALL
    else:
        relaxed = supcn(mark_all(h), mark_all(g), p).supcn
        # ThereExistsOnly needs some controlled run to touch a marked spec state
        if cls is Classification.THERE_EXISTS_ONLY:
            assert not relaxed.is_empty()
