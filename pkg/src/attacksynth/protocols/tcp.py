"""TCP connection-establishment component automata.

Two architectures: peers talk to the network through four relay channels,
or directly (channel-free), in which case event subscripts are renamed so
that peer and network events synchronise (``AC1``/``C1N`` become ``AN``,
``C2A``/``NC2`` become ``NA`` and likewise for B).

Event names: ``SYN_AC1`` is a SYN from peer A into channel 1;
``SYN_ACK_C4B`` is a SYN-ACK from channel 4 to peer B.
"""

from dataclasses import dataclass
from enum import Enum

from ..automaton import Automaton, compose, rename_events
from ..errors import UnsupportedCombination

PACKETS = ("SYN", "ACK", "FIN", "SYN_ACK")

CHANNEL_FREE_RENAMING = {
    "AC1": "AN", "C2A": "NA", "BC3": "BN", "C4B": "NB",
    "C1N": "AN", "NC2": "NA", "C3N": "BN", "NC4": "NB",
}

PEER_STATES = (
    "closed", "SYN_sent", "listen", "i0", "i1", "i2", "established",
    "SYN_received", "i3", "close_wait", "last_ACK", "FIN_wait_1",
    "FIN_wait_2", "i4", "i5", "closing", "time_wait",
)
PEER_MARKED = ("closed", "listen", "established")

# peer -> (outgoing subscript, incoming subscript)
_PEER_LINKS = {"A": ("AC1", "C2A"), "B": ("BC3", "C4B")}
# channel -> (subscript into the channel, subscript out of it)
_CHANNEL_LINKS = {1: ("AC1", "C1N"), 2: ("NC2", "C2A"), 3: ("BC3", "C3N"), 4: ("NC4", "C4B")}
# network relays: (ingress subscript, egress subscript, satellite suffix)
_NETWORK_ROUTES = (("C1N", "NC4", "atob"), ("C3N", "NC2", "btoa"))

ATTK = frozenset(f"{p}_{s}" for p in PACKETS for s in ("NC2", "NC4"))


class NetworkAttack(Enum):
    NONE = "none"
    FULL = "full"
    WEAK = "weak"


@dataclass(frozen=True)
class TcpVariantFlags:
    with_channels: bool = True
    peer_timeout: bool = False
    network_attack: NetworkAttack = NetworkAttack.NONE

    def __post_init__(self):
        if self.network_attack is NetworkAttack.WEAK and self.with_channels:
            raise UnsupportedCombination("the weak network attack is defined only without channels")


def rename_channel_free(a):
    """Apply the channel-free subscript renaming to every event of ``a``."""
    mapping = {}
    for e in a.events:
        head, _, sub = e.rpartition("_")
        if sub in CHANNEL_FREE_RENAMING:
            mapping[e] = f"{head}_{CHANNEL_FREE_RENAMING[sub]}"
    return rename_events(a, mapping)


def rename_event(event):
    head, _, sub = event.rpartition("_")
    if sub in CHANNEL_FREE_RENAMING:
        return f"{head}_{CHANNEL_FREE_RENAMING[sub]}"
    return event


def peer_events(who, timeout=False):
    out, inc = _PEER_LINKS[who]
    events = {f"listen_{who}", f"deleteTCB_{who}"}
    events.update(f"{p}_{s}" for p in PACKETS for s in (out, inc))
    if timeout:
        events.add(f"timeout_{who}")
    return frozenset(events)


def peer(who, timeout=False, marked=PEER_MARKED, channel_free=False):
    """Peer ``"A"`` or ``"B"``: three-way handshake plus connection teardown."""
    out, inc = _PEER_LINKS[who]

    def o(p):
        return f"{p}_{out}"

    def i(p):
        return f"{p}_{inc}"

    trans = [
        ("closed", o("SYN"), "SYN_sent"),
        ("SYN_sent", i("SYN_ACK"), "i0"),
        ("i0", o("ACK"), "established"),
        ("SYN_sent", i("SYN"), "i1"),
        ("i1", o("ACK"), "SYN_received"),
        ("SYN_received", i("ACK"), "established"),
        ("closed", f"listen_{who}", "listen"),
        ("listen", i("SYN"), "i2"),
        ("i2", o("SYN_ACK"), "SYN_received"),
        ("established", i("FIN"), "i3"),
        ("i3", o("ACK"), "close_wait"),
        ("close_wait", o("FIN"), "last_ACK"),
        ("last_ACK", i("ACK"), "closed"),
        ("established", o("FIN"), "FIN_wait_1"),
        ("FIN_wait_1", i("ACK"), "FIN_wait_2"),
        ("FIN_wait_1", i("FIN"), "i4"),
        ("FIN_wait_2", i("FIN"), "i5"),
        ("i4", o("ACK"), "closing"),
        ("closing", i("ACK"), "closed"),
        ("i5", o("ACK"), "time_wait"),
        ("time_wait", f"deleteTCB_{who}", "closed"),
    ]
    if timeout:
        trans.append(("listen", f"timeout_{who}", "closed"))
    states = [f"{who}_{s}" if s.startswith("i") and s[1:].isdigit() else s for s in PEER_STATES]
    relabel = dict(zip(PEER_STATES, states))
    trans = [(relabel[s], e, relabel[t]) for s, e, t in trans]
    marked = [relabel[m] for m in marked]
    a = Automaton(states, peer_events(who, timeout), trans, "closed", marked, name=f"G_P{who}")
    return rename_channel_free(a) if channel_free else a


def channel(k):
    """Relay channel ``k`` in 1..4: hub plus one pending state per packet type."""
    src, dst = _CHANNEL_LINKS[k]
    states = ["idle"] + [f"{p}_pending" for p in PACKETS]
    trans = []
    for p in PACKETS:
        trans.append(("idle", f"{p}_{src}", f"{p}_pending"))
        trans.append((f"{p}_pending", f"{p}_{dst}", "idle"))
    events = {e for _, e, _ in trans}
    return Automaton(states, events, trans, "idle", states, name=f"G_C{k}")


def _network_events():
    return frozenset(f"{p}_{s}" for p in PACKETS for s in ("C1N", "C3N", "NC2", "NC4"))


E_N = _network_events()
E_N_A = ATTK | E_N


def _network_structure(attack_returns):
    states = ["hub"]
    trans = []
    for ingress, egress, tag in _NETWORK_ROUTES:
        for p in PACKETS:
            sat = f"{p}_{tag}_pending"
            states.append(sat)
            trans.append(("hub", f"{p}_{ingress}", sat))
            if attack_returns:
                trans.extend((sat, e, "hub") for e in sorted(ATTK))
            else:
                trans.append((sat, f"{p}_{egress}", "hub"))
    return states, trans


def network(channel_free=False):
    states, trans = _network_structure(attack_returns=False)
    a = Automaton(states, E_N, trans, "hub", states, name="G_N")
    return rename_channel_free(a) if channel_free else a


def attacked_network(kind=NetworkAttack.FULL, channel_free=False):
    """Network infiltrated by the attacker.

    FULL: every satellite may return to the hub on any outgoing packet
    (the ATTK bundle). WEAK (channel-free only): nominal relays plus one
    forged SYN_ACK to B from the SYN-from-B satellite.
    """
    kind = NetworkAttack(kind)
    if kind is NetworkAttack.FULL:
        states, trans = _network_structure(attack_returns=True)
        a = Automaton(states, E_N_A, trans, "hub", states, name="G_N,a")
        return rename_channel_free(a) if channel_free else a
    if kind is NetworkAttack.WEAK:
        if not channel_free:
            raise UnsupportedCombination("the weak network attack is defined only without channels")
        states, trans = _network_structure(attack_returns=False)
        a = rename_channel_free(Automaton(states, E_N, trans, "hub", states, name="G_N,a^w"))
        return Automaton(a.states, a.events,
                         list(a.transitions()) + [("SYN_btoa_pending", "SYN_ACK_NB", "hub")],
                         "hub", a.states, name="G_N,a^w")
    raise UnsupportedCombination(f"no network attack of kind {kind.value!r}")


class Component(Enum):
    PEER_A = "peer_a"
    PEER_B = "peer_b"
    CHANNEL1 = "channel1"
    CHANNEL2 = "channel2"
    CHANNEL3 = "channel3"
    CHANNEL4 = "channel4"
    NETWORK = "network"


def tcp_component(name, flags=TcpVariantFlags()):
    name = Component(name)
    cf = not flags.with_channels
    if name is Component.PEER_A:
        return peer("A", flags.peer_timeout, channel_free=cf)
    if name is Component.PEER_B:
        return peer("B", flags.peer_timeout, channel_free=cf)
    if name is Component.NETWORK:
        if flags.network_attack is NetworkAttack.NONE:
            return network(cf)
        return attacked_network(flags.network_attack, cf)
    if cf:
        raise UnsupportedCombination("channel-free architecture has no channels")
    return channel(int(name.value[-1]))


def network_for(flags):
    if flags.network_attack is NetworkAttack.NONE:
        return network(not flags.with_channels)
    return attacked_network(flags.network_attack, not flags.with_channels)


def channels():
    return [channel(k) for k in (1, 2, 3, 4)]


def build_plant(flags=TcpVariantFlags(), peer_a_marked=PEER_MARKED,
                peer_b_marked=PEER_MARKED, name="G_a"):
    """``G_PA ∥ G_PB [∥ G_C1..G_C4] ∥ G_N(,a)`` with optional peer re-marking."""
    cf = not flags.with_channels
    pa = peer("A", flags.peer_timeout, peer_a_marked, cf)
    pb = peer("B", flags.peer_timeout, peer_b_marked, cf)
    parts = [pa, pb] + ([] if cf else channels()) + [network_for(flags)]
    return compose(*parts, name=name)


def controllable_events(channel_free):
    return frozenset(rename_event(e) for e in ATTK) if channel_free else ATTK


def observable_events(channel_free):
    return frozenset(rename_event(e) for e in E_N_A) if channel_free else E_N_A
