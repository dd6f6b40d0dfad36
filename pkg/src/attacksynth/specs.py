"""Property monitors and the attacker specifications built from them.

A safety monitor marks the states where the property has been violated; the
attacker's spec is the plant composed with the monitor and trimmed, so its
marked strings are exactly the violating ones. Liveness specs either come
from a dedicated monitor or from marking the plant's blocking states.
"""

from dataclasses import dataclass
from enum import Enum

from .automaton import (Automaton, compose, deadlock_states, is_trim, livelock_states,
                        remark, shortest_marked_string, trim, unmark_all)
from .errors import ModelIncorrect, PlantIsTrim
from .protocols import tcp


class Kind(Enum):
    SAFETY = "safety"
    LIVENESS_DEDICATED = "liveness-dedicated"
    LIVENESS_FROM_DEADLOCKS = "liveness-from-deadlocks"


@dataclass(frozen=True)
class PropertyKind:
    kind: Kind
    monitor: Automaton = None

    def __post_init__(self):
        if self.kind is not Kind.LIVENESS_FROM_DEADLOCKS:
            if self.monitor is None or not self.monitor.num_marked:
                raise ValueError(f"{self.kind.value} property needs a monitor with a marked state")

    @classmethod
    def safety(cls, monitor):
        return cls(Kind.SAFETY, monitor)

    @classmethod
    def liveness(cls, monitor=None):
        if monitor is None:
            return cls(Kind.LIVENESS_FROM_DEADLOCKS)
        return cls(Kind.LIVENESS_DEDICATED, monitor)


def _order_monitor(first, second, name):
    """``first`` and ``second`` must alternate, starting with ``first``; q2 flags a violation."""
    trans = [
        ("q0", first, "q1"), ("q1", second, "q0"),
        ("q1", first, "q2"), ("q0", second, "q2"),
        ("q2", first, "q2"), ("q2", second, "q2"),
    ]
    return Automaton(["q0", "q1", "q2"], {first, second}, trans, "q0", ["q2"], name=name)


def abp_safety_monitor(which=1):
    """Monitor 1: send/deliver alternate. Monitor 2: deliver/done alternate."""
    if which == 1:
        return _order_monitor("send", "deliver", "G_sm1")
    if which == 2:
        return _order_monitor("deliver", "done", "G_sm2")
    raise ValueError(f"no ABP safety monitor {which!r}")


def abp_liveness_monitor():
    """Marked while the first send is still waiting for a deliver."""
    trans = [
        ("q0", "deliver", "q0"), ("q0", "send", "q1"),
        ("q1", "send", "q1"), ("q1", "deliver", "q2"),
        ("q2", "send", "q2"), ("q2", "deliver", "q2"),
    ]
    return Automaton(["q0", "q1", "q2"], {"send", "deliver"}, trans, "q0", ["q1"], name="G_lm")


def tcp_tm1_monitor(channel_free=False, timeout=False):
    """Peer A closed while peer B is established."""
    pa = tcp.peer("A", timeout, marked=("closed",), channel_free=channel_free)
    pb = tcp.peer("B", timeout, marked=("established",), channel_free=channel_free)
    return compose(pa, pb, name="G_sm^TM1")


def build_safety_spec(g_other_a, g_sm, name="H_a"):
    return trim(compose(g_other_a, g_sm, name=name))


def build_liveness_spec(g_other_a, g_lm, name="H_a"):
    """Dedicated liveness monitor: same construction as the safety spec."""
    return trim(compose(g_other_a, g_lm, name=name))


def blocking_marking(g_a):
    """Deadlock and livelock states of ``g_a`` (the illegal states for liveness)."""
    return deadlock_states(g_a) | livelock_states(g_a)


def build_liveness_spec_from_deadlocks(g_a, name="H_a"):
    """Unmark ``g_a``, mark its deadlocks (and livelocks, if any), trim."""
    if is_trim(g_a):
        raise PlantIsTrim(f"{g_a.name or 'plant'} is trim; no blocking state to steer into")
    bad = blocking_marking(g_a)
    return trim(remark(unmark_all(g_a), bad, name=name))


def validate_nominal(prop, g_nom, g_other=None):
    """Check the nominal model satisfies ``prop``; raise ModelIncorrect otherwise.

    Safety: ``trim(g_other ∥ monitor)`` has no marked state (``g_other``
    defaults to ``g_nom``). Liveness: ``g_nom`` is trim.
    """
    if prop.kind is Kind.SAFETY:
        base = g_nom if g_other is None else g_other
        h_nom = trim(compose(base, prop.monitor, name="H_nom"))
        if h_nom.num_marked:
            state = min(h_nom.marked, key=repr)
            raise ModelIncorrect(
                f"nominal model violates the safety property, e.g. via "
                f"{'.'.join(shortest_marked_string(h_nom))}", witness=state)
        return True
    if not is_trim(g_nom):
        blocking = deadlock_states(g_nom) | livelock_states(g_nom)
        if not blocking:
            # unreachable junk only; the reachable part is what matters
            return True
        raise ModelIncorrect("nominal model is blocking", witness=min(blocking, key=repr))
    return True
