import pytest

from attacksynth.automaton import contains, deadlock_states, is_trim, strings_up_to
from attacksynth.errors import UnsupportedCombination
from attacksynth.protocols import abp, tcp
from attacksynth.protocols.abp import Attack, AbpVariantFlags
from attacksynth.protocols.tcp import NetworkAttack, TcpVariantFlags


# -- ABP ---------------------------------------------------------------------------

def test_abp_alphabets_partition():
    assert abp.E_FC == {"p0", "p1", "p0_prime", "p1_prime"}
    assert abp.E_BC == {"a0", "a1", "a0_prime", "a1_prime"}
    assert abp.CONTROLLABLE <= abp.OBSERVABLE
    assert abp.CONTROLLABLE == {e for e in abp.E_FC | abp.E_BC if e.endswith("_prime")}


@pytest.mark.parametrize("factory", [
    lambda: abp.sender(True), lambda: abp.sender(False), abp.receiver,
    lambda: abp.sending_client(True), abp.receiving_client, abp.timer,
    lambda: abp.forward_channel(Attack.NONE), lambda: abp.backward_channel(Attack.NONE),
])
def test_abp_components_deterministic_and_all_marked(factory):
    a = factory()
    assert a.is_deterministic()
    assert a.num_marked == a.num_states


def test_sender_alternates_bits():
    s = abp.sender(False)
    assert contains(s, ("send", "p0", "a0_prime", "done", "send", "p1"))[0]
    assert not contains(s, ("send", "p1"))[0]


def test_sender_dead_transitions_only_add_behaviour():
    with_dead = set(strings_up_to(abp.sender(True), 6))
    without = set(strings_up_to(abp.sender(False), 6))
    assert without <= with_dead


def test_receiver_delivers_then_acks():
    r = abp.receiver()
    assert contains(r, ("p0_prime", "deliver", "a0"))[0]


def test_nominal_channel_is_lossless_relay():
    fc = abp.forward_channel(Attack.NONE)
    assert contains(fc, ("p0", "p0_prime"))[0]
    assert not contains(fc, ("p1_prime",))[0]


def test_attacked_channel_can_flip_the_bit():
    fc = abp.forward_channel(Attack.FULL)
    assert contains(fc, ("p0", "p1_prime"))[0]
    assert contains(fc, ("p1", "p0_prime"))[0]
    # nothing leaves an empty channel
    assert not contains(fc, ("p1_prime",))[0]


def test_weak_and_oneshot_attacks_sit_between():
    nominal = set(strings_up_to(abp.forward_channel(Attack.NONE), 5))
    full = set(strings_up_to(abp.forward_channel(Attack.FULL), 5))
    for kind in (Attack.WEAK, Attack.ONESHOT):
        lang = set(strings_up_to(abp.forward_channel(kind), 5))
        assert nominal < lang <= full


def test_backward_attack_variants_restricted():
    AbpVariantFlags(backward_attack=Attack.FULL)
    with pytest.raises(UnsupportedCombination):
        AbpVariantFlags(backward_attack=Attack.WEAK)


def test_nominal_plant_is_trim():
    for dead in (True, False):
        g = abp.nominal_plant(dead)
        assert g.is_deterministic()
        assert is_trim(g)
        assert deadlock_states(g) == set()


def test_attacked_plant_contains_nominal():
    g = abp.build_plant(AbpVariantFlags(False, Attack.FULL))
    nom = abp.nominal_plant(False)
    assert set(strings_up_to(nom, 8)) <= set(strings_up_to(g, 8))
    assert g.num_states > nom.num_states


# -- TCP ---------------------------------------------------------------------------

def test_peer_shape():
    a = tcp.peer("A")
    assert a.num_states == len(tcp.PEER_STATES) == 17
    assert a.initial == "closed"
    assert a.is_deterministic()
    assert {"listen_A", "deleteTCB_A"} <= a.events


def test_peer_three_way_handshake():
    a = tcp.peer("A")
    # active open
    assert contains(a, ("SYN_AC1", "SYN_ACK_C2A", "ACK_AC1"))[0]
    b = tcp.peer("B", marked=("established",))
    # passive open
    assert contains(b, ("listen_B", "SYN_C4B", "SYN_ACK_BC3", "ACK_C4B"))[1]


def test_timeout_peer_adds_event():
    assert tcp.peer("A", True).events - tcp.peer("A").events
    assert tcp.peer("A", True).num_states == tcp.peer("A").num_states


def test_rename_channel_free():
    assert tcp.rename_event("SYN_AC1") == "SYN_AN"
    assert tcp.rename_event("ACK_C4B") == "ACK_NB"
    assert tcp.rename_event("listen_A") == "listen_A"
    cf = tcp.peer("A", channel_free=True)
    assert "SYN_AN" in cf.events and "SYN_AC1" not in cf.events


def test_channel_is_one_place_buffer():
    ch = tcp.channel(1)
    assert contains(ch, ("SYN_AC1", "SYN_C1N"))[0]
    assert not contains(ch, ("SYN_AC1", "ACK_AC1"))[0]


def test_network_relays_without_forging():
    net = tcp.network(True)
    assert contains(net, ("SYN_AN", "SYN_NB"))[0]
    assert not contains(net, ("SYN_AN", "ACK_NB"))[0]
    full = tcp.attacked_network(NetworkAttack.FULL, True)
    assert contains(full, ("SYN_AN", "ACK_NB"))[0]
    assert not contains(full, ("SYN_NB",))[0]


def test_event_sets():
    assert tcp.controllable_events(True) <= tcp.observable_events(True)
    assert tcp.ATTK <= tcp.E_N_A
    assert all(e.endswith(("NC2", "NC4")) for e in tcp.ATTK)


def test_weak_network_needs_channel_free():
    TcpVariantFlags(with_channels=False, network_attack=NetworkAttack.WEAK)
    with pytest.raises(UnsupportedCombination):
        TcpVariantFlags(with_channels=True, network_attack=NetworkAttack.WEAK)


def test_channel_free_plants():
    nominal = tcp.build_plant(TcpVariantFlags(False, True))
    assert (nominal.num_states, nominal.num_marked) == (41, 5)
    assert is_trim(nominal)
    attacked = tcp.build_plant(TcpVariantFlags(False, True, NetworkAttack.FULL))
    assert (attacked.num_states, attacked.num_marked) == (580, 27)
    assert not is_trim(attacked)
