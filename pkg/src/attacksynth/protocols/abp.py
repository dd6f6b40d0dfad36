"""Alternating bit protocol component automata.

Transition tables transcribe the sender/receiver/channel/client/timer
figures. Primes are spelled ``_prime`` (``p0_prime`` is p0 after the forward
channel). Every component state is marked.

The channels are given as nondeterministic automata; the plant uses their
observers (all four channel events observable), which generate the same
languages but are deterministic.
"""

from dataclasses import dataclass
from enum import Enum

from ..automaton import Automaton, compose, observer
from ..errors import UnsupportedCombination

SEND, DONE, TIMEOUT, DELIVER = "send", "done", "timeout", "deliver"
P0, P1, P0P, P1P = "p0", "p1", "p0_prime", "p1_prime"
A0, A1, A0P, A1P = "a0", "a1", "a0_prime", "a1_prime"

E_S = frozenset({SEND, DONE, TIMEOUT, P0, P1, A0P, A1P})
E_R = frozenset({DELIVER, P0P, P1P, A0, A1})
E_FC = frozenset({P0, P1, P0P, P1P})
E_BC = frozenset({A0, A1, A0P, A1P})
E_SC = frozenset({SEND, DONE})
E_RC = frozenset({DELIVER})
E_T = frozenset({TIMEOUT})
E_NOM = E_S | E_R | E_FC | E_BC | E_SC | E_RC | E_T

CONTROLLABLE = frozenset({P0P, P1P, A0P, A1P})
OBSERVABLE = E_FC | E_BC


class Attack(Enum):
    NONE = "none"
    FULL = "full"
    WEAK = "weak"
    ONESHOT = "oneshot"


class Component(Enum):
    SENDER = "sender"
    RECEIVER = "receiver"
    FORWARD_CHANNEL_ND = "forward_channel_nd"
    BACKWARD_CHANNEL_ND = "backward_channel_nd"
    SENDING_CLIENT = "sending_client"
    RECEIVING_CLIENT = "receiving_client"
    TIMER = "timer"


@dataclass(frozen=True)
class AbpVariantFlags:
    with_dead_transitions: bool = True
    forward_attack: Attack = Attack.NONE
    backward_attack: Attack = Attack.NONE

    def __post_init__(self):
        if self.backward_attack not in (Attack.NONE, Attack.FULL):
            raise UnsupportedCombination(
                f"backward channel supports only none/full attacks, got {self.backward_attack.value}")


_SENDER = [
    ("s0", A1P, "s0"), ("s0", TIMEOUT, "s0"), ("s0", SEND, "s1"),
    ("s1", P0, "s2"),
    ("s2", TIMEOUT, "s1"), ("s2", A1P, "s2"), ("s2", A0P, "s3"),
    ("s3", DONE, "s4"),
    ("s4", A0P, "s4"), ("s4", TIMEOUT, "s4"), ("s4", SEND, "s5"),
    ("s5", P1, "s6"),
    ("s6", TIMEOUT, "s5"), ("s6", A1P, "s7"),
    ("s7", DONE, "s0"),
]
# never exercised by the nominal system; dropped from Setup 2 on
SENDER_DEAD = [
    ("s0", A0P, "s0"),
    ("s2", SEND, "s1"),
    ("s4", A1P, "s5"),
    ("s6", SEND, "s5"),
]

_RECEIVER = [
    ("r0", P0P, "r1"), ("r1", DELIVER, "r2"), ("r2", A0, "r3"),
    ("r3", P0P, "r2"), ("r3", P1P, "r4"), ("r4", DELIVER, "r0"),
    ("r0", P1P, "r5"), ("r5", A1, "r0"),
]

_SENDING_CLIENT = [("sc0", SEND, "sc1"), ("sc1", DONE, "sc0")]
SENDING_CLIENT_DEAD = [("sc0", DONE, "sc0")]


def _channel_nd(x0, x1, x2, d0, d1, o0, o1):
    """Lossy/duplicating channel: holds one packet, may drop or repeat it."""
    return [
        (x0, d0, x0), (x0, d1, x0), (x0, d0, x1), (x0, d1, x2),
        (x1, d0, x1), (x1, o0, x1), (x1, d1, x1), (x1, o0, x0),
        (x2, d0, x2), (x2, o1, x2), (x2, d1, x2), (x2, o1, x0),
    ]


def _channel_attack(x0, x1, x2, o0, o1):
    """Red PITM edges: the held packet can leave with either bit."""
    return [(x1, o1, x0), (x1, o1, x1), (x2, o0, x0), (x2, o0, x2)]


def _all_marked(states, events, transitions, initial, name):
    return Automaton(states, events, transitions, initial, marked=states, name=name)


def sender(with_dead_transitions=True):
    trans = _SENDER + (SENDER_DEAD if with_dead_transitions else [])
    states = [f"s{i}" for i in range(8)]
    return _all_marked(states, E_S, trans, "s0", "G_S" if with_dead_transitions else "G_S'")


def receiver():
    return _all_marked([f"r{i}" for i in range(6)], E_R, _RECEIVER, "r0", "G_R")


def sending_client(with_dead_transitions=True):
    trans = _SENDING_CLIENT + (SENDING_CLIENT_DEAD if with_dead_transitions else [])
    return _all_marked(["sc0", "sc1"], E_SC, trans, "sc0",
                       "G_SC" if with_dead_transitions else "G_SC'")


def receiving_client():
    return _all_marked(["rc0"], E_RC, [("rc0", DELIVER, "rc0")], "rc0", "G_RC")


def timer():
    return _all_marked(["t0"], E_T, [("t0", TIMEOUT, "t0")], "t0", "G_T")


def forward_channel_nd():
    trans = _channel_nd("f0", "f1", "f2", P0, P1, P0P, P1P)
    return _all_marked(["f0", "f1", "f2"], E_FC, trans, "f0", "G_FC^nd")


def backward_channel_nd():
    trans = _channel_nd("b0", "b1", "b2", A0, A1, A0P, A1P)
    return _all_marked(["b0", "b1", "b2"], E_BC, trans, "b0", "G_BC^nd")


def attacked_channel_nd(direction, kind):
    """Nondeterministic channel with the attacker's transitions added.

    ``direction`` is ``"forward"`` or ``"backward"``; ``kind`` is an
    :class:`Attack` other than NONE. Weak and one-shot attacks exist only on
    the forward channel.
    """
    kind = Attack(kind)
    if direction == "forward":
        base = _channel_nd("f0", "f1", "f2", P0, P1, P0P, P1P)
        if kind is Attack.FULL:
            trans = base + _channel_attack("f0", "f1", "f2", P0P, P1P)
            return _all_marked(["f0", "f1", "f2"], E_FC, trans, "f0", "G_FC,a^nd")
        if kind is Attack.WEAK:
            trans = base + [("f1", P1P, "f0")]
            return _all_marked(["f0", "f1", "f2"], E_FC, trans, "f0", "G_FC,wa^nd")
        if kind is Attack.ONESHOT:
            copy = _channel_nd("f0'", "f1'", "f2'", P0, P1, P0P, P1P)
            trans = base + copy + [("f1", P1P, "f0'")]
            states = ["f0", "f1", "f2", "f0'", "f1'", "f2'"]
            return _all_marked(states, E_FC, trans, "f0", "G_FC,a^oneshot,nd")
    elif direction == "backward":
        if kind is Attack.FULL:
            base = _channel_nd("b0", "b1", "b2", A0, A1, A0P, A1P)
            trans = base + _channel_attack("b0", "b1", "b2", A0P, A1P)
            return _all_marked(["b0", "b1", "b2"], E_BC, trans, "b0", "G_BC,a^nd")
    else:
        raise UnsupportedCombination(f"unknown channel direction {direction!r}")
    raise UnsupportedCombination(f"no {kind.value} attack defined for the {direction} channel")


def _channel(direction, kind):
    if kind is Attack.NONE:
        nd = forward_channel_nd() if direction == "forward" else backward_channel_nd()
    else:
        nd = attacked_channel_nd(direction, kind)
    obs = observer(nd, nd.events, name=nd.name.replace("^nd", "").replace(",nd", ""))
    return obs


def forward_channel(kind=Attack.NONE):
    """Deterministic forward channel: observer of the nondeterministic model."""
    return _channel("forward", Attack(kind))


def backward_channel(kind=Attack.NONE):
    return _channel("backward", Attack(kind))


def abp_component(name, flags=AbpVariantFlags()):
    name = Component(name)
    dead = flags.with_dead_transitions
    if name is Component.SENDER:
        return sender(dead)
    if name is Component.RECEIVER:
        return receiver()
    if name is Component.FORWARD_CHANNEL_ND:
        if flags.forward_attack is Attack.NONE:
            return forward_channel_nd()
        return attacked_channel_nd("forward", flags.forward_attack)
    if name is Component.BACKWARD_CHANNEL_ND:
        if flags.backward_attack is Attack.NONE:
            return backward_channel_nd()
        return attacked_channel_nd("backward", flags.backward_attack)
    if name is Component.SENDING_CLIENT:
        return sending_client(dead)
    if name is Component.RECEIVING_CLIENT:
        return receiving_client()
    return timer()


def components(flags=AbpVariantFlags()):
    """Plant factors in composition order: sender, receiver, channels, environment."""
    dead = flags.with_dead_transitions
    return [
        sender(dead),
        receiver(),
        forward_channel(flags.forward_attack),
        backward_channel(flags.backward_attack),
        sending_client(dead),
        receiving_client(),
        timer(),
    ]


def build_plant(flags=AbpVariantFlags(), name="G_a"):
    """``G_S ∥ G_R ∥ G_FC(,a) ∥ G_BC(,a) ∥ G_SC ∥ G_RC ∥ G_T`` for the given variant."""
    return compose(*components(flags), name=name)


def nominal_plant(with_dead_transitions=True):
    return build_plant(AbpVariantFlags(with_dead_transitions), name="G_nom")
