"""Automaton documents (JSON) and Graphviz export.

A document carries the automaton plus per-event attacker attributes::

    {"format_version": 1, "name": "G_T",
     "events": [{"name": "timeout", "controllable": false, "observable": true}],
     "states": [{"name": "t0", "marked": true}],
     "initial": "t0",
     "transitions": [{"from": "t0", "event": "timeout", "to": "t0"}]}

Composite state labels (tuples) are flattened to strings such as
``(s0,r0,(f0,f1))`` so names survive the round trip.
"""

import json
import re

from .automaton import Automaton
from .errors import DocumentError
from .supervisory import EventPartition

FORMAT_VERSION = 1
EVENT_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def state_name(label):
    if isinstance(label, tuple):
        return "(" + ",".join(state_name(x) for x in label) + ")"
    return str(label)


def to_document(a, partition=None):
    """Plain-dict document for ``a``; event attributes come from ``partition``."""
    ctrl = partition.controllable if partition else frozenset()
    obs = partition.observable if partition else a.events
    names = [state_name(s) for s in a.states]
    if len(set(names)) != len(names):
        raise DocumentError(f"state names of {a.name!r} collide after flattening")
    name_of = dict(zip(a.states, names))
    marked = a.marked
    return {
        "format_version": FORMAT_VERSION,
        "name": a.name,
        "events": [{"name": e, "controllable": e in ctrl, "observable": e in obs}
                   for e in sorted(a.events)],
        "states": [{"name": name_of[s], "marked": s in marked} for s in a.states],
        "initial": name_of[a.initial] if a.initial is not None else None,
        "transitions": [{"from": name_of[s], "event": e, "to": name_of[t]}
                        for s, e, t in a.transitions()],
    }


def dumps(a, partition=None):
    return json.dumps(to_document(a, partition), indent=1) + "\n"


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise DocumentError(f"{where}: field {key!r} has the wrong type")
    return value


def from_document(doc):
    """Parse a document dict into ``(automaton, partition)``."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    version = _require(doc, "format_version", int, "document")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version}")
    name = doc.get("name", "")
    events, ctrl, obs = [], set(), set()
    for i, ev in enumerate(_require(doc, "events", list, "document")):
        en = _require(ev, "name", str, f"events[{i}]")
        if not EVENT_NAME.match(en):
            raise DocumentError(f"events[{i}]: invalid event name {en!r}")
        events.append(en)
        if ev.get("controllable", False):
            ctrl.add(en)
        if ev.get("observable", True):
            obs.add(en)
    if len(set(events)) != len(events):
        raise DocumentError("duplicate event names")
    states, marked = [], []
    for i, st in enumerate(_require(doc, "states", list, "document")):
        sn = _require(st, "name", str, f"states[{i}]")
        states.append(sn)
        if st.get("marked", False):
            marked.append(sn)
    if len(set(states)) != len(states):
        raise DocumentError("duplicate state names")
    initial = doc.get("initial")
    known_states = set(states)
    known_events = set(events)
    trans = []
    for i, t in enumerate(_require(doc, "transitions", list, "document")):
        src = _require(t, "from", str, f"transitions[{i}]")
        ev = _require(t, "event", str, f"transitions[{i}]")
        dst = _require(t, "to", str, f"transitions[{i}]")
        if src not in known_states or dst not in known_states:
            raise DocumentError(f"transitions[{i}]: unknown state")
        if ev not in known_events:
            raise DocumentError(f"transitions[{i}]: unknown event {ev!r}")
        trans.append((src, ev, dst))
    if not states:
        return Automaton.empty(events, name), EventPartition(ctrl, obs)
    if initial not in known_states:
        raise DocumentError(f"initial state {initial!r} is not a declared state")
    return Automaton(states, events, trans, initial, marked, name=name), EventPartition(ctrl, obs)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None
    return from_document(doc)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(a, path, partition=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(a, partition))


def _dot_id(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(a):
    """Graphviz source: double circles for marked states, parallel edges merged."""
    lines = [f"digraph {_dot_id(a.name or 'automaton')} {{", "  rankdir=LR;",
             '  __start [shape=point, label=""];']
    marked = a.marked
    for s in a.states:
        shape = "doublecircle" if s in marked else "circle"
        lines.append(f"  {_dot_id(state_name(s))} [shape={shape}];")
    if a.initial is not None:
        lines.append(f"  __start -> {_dot_id(state_name(a.initial))};")
    edges = {}
    for s, e, t in a.transitions():
        edges.setdefault((state_name(s), state_name(t)), []).append(e)
    for (s, t), evs in edges.items():
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label={_dot_id(', '.join(sorted(evs)))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
