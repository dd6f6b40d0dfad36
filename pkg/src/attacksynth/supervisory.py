"""Supervisory control under partial observation.

The core routine is :func:`supcn`, the supremal controllable and normal
sublanguage of ``L_m(h) ∩ L(g)`` with respect to the plant ``g``. It works on
an observer-refined product: each state pairs a product state ``(h, g)``
with the observer estimate (set of product states) that the attacker holds
after the observation seen so far. Because the estimate is a function of the
projection alone, "remove every string with this projection" is the same as
"remove every state carrying this estimate", which turns normality into a
state-removal rule alongside controllability and trimming.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .automaton import (Automaton, _unobservable_reach, compose, determinize, mark_all,
                        mark_product, observer, trim)
from .errors import AlphabetMismatch, EmptySupervisor, PartitionInvalid


class Classification(Enum):
    FOR_ALL = "ForAll"
    THERE_EXISTS_ONLY = "ThereExistsOnly"
    NO_ATTACK = "NoAttack"


@dataclass(frozen=True)
class EventPartition:
    """Attacker's view of the alphabet: what it can disable and what it sees."""

    controllable: frozenset
    observable: frozenset

    def __init__(self, controllable, observable):
        object.__setattr__(self, "controllable", frozenset(controllable))
        object.__setattr__(self, "observable", frozenset(observable))

    def validate(self, alphabet):
        alphabet = frozenset(alphabet)
        extra = (self.controllable | self.observable) - alphabet
        if extra:
            raise PartitionInvalid(f"events {sorted(extra)} are not in the plant alphabet")
        if not self.controllable <= self.observable:
            raise PartitionInvalid(
                "controllable events must be observable; unobservable controllable: "
                f"{sorted(self.controllable - self.observable)}")

    def uncontrollable(self, alphabet):
        return frozenset(alphabet) - self.controllable

    def unobservable(self, alphabet):
        return frozenset(alphabet) - self.observable


@dataclass
class SynthesisResult:
    supcn: Automaton
    disablement_needed: bool
    classification: Classification = Classification.NO_ATTACK
    # supCN state label -> plant state label, used by realization checks
    plant_state: dict = field(default_factory=dict, repr=False)

    @property
    def is_empty(self):
        return self.supcn.is_empty()

    @property
    def state_count(self):
        return self.supcn.num_states

    @property
    def marked_count(self):
        return self.supcn.num_marked


@dataclass
class SupervisorRealization:
    """Observer-based control map.

    ``automaton`` moves only on observable events and carries self-loops for
    the unobservable controllable events it enables. ``marking`` is the spec
    the supervisor marks with (a marking supervisor).
    """

    automaton: Automaton
    enabled_map: dict
    marking: Automaton


# -- checks ------------------------------------------------------------------

def _product_walk(k, g):
    """BFS over reachable pairs of deterministic ``k`` and ``g``.

    Yields ``(pair, parent_map)`` where pair is (ki, gi) and parent_map lets
    callers rebuild the string reaching it.
    """
    k = determinize(k)
    g = determinize(g)
    start = (k._init, g._init)
    parent = {start: None}
    order = [start]
    queue = deque([start])
    while queue:
        ki, gi = cur = queue.popleft()
        krow = k._delta[ki]
        for e, gt in sorted(g._delta[gi].items()):
            kt = krow.get(e)
            if kt is None:
                continue
            nxt = (kt[0], gt[0])
            if nxt not in parent:
                parent[nxt] = (cur, e)
                order.append(nxt)
                queue.append(nxt)
    return k, g, order, parent


def _path(parent, node):
    out = []
    while parent[node] is not None:
        node, e = parent[node]
        out.append(e)
    return tuple(reversed(out))


def check_controllability(k, g, uncontrollable, limit=None):
    """Is the closure of ``L(k)`` invariant under uncontrollable moves of ``g``?

    Returns ``(ok, witnesses)`` with each witness a ``(prefix, event)`` pair
    such that ``prefix`` is in the closure, ``prefix.event`` is feasible in
    ``g`` and leaves the closure. ``k`` should be trim so that its generated
    language is the closure of its marked language.
    """
    if k.is_empty() or g.is_empty():
        return True, []
    uncontrollable = frozenset(uncontrollable)
    k, g, order, parent = _product_walk(k, g)
    witnesses = []
    for ki, gi in order:
        krow = k._delta[ki]
        for e in sorted(g._delta[gi]):
            if e in uncontrollable and e not in krow:
                if e not in k.events:
                    continue
                witnesses.append((_path(parent, (ki, gi)), e))
                if limit is not None and len(witnesses) >= limit:
                    return False, witnesses
    return not witnesses, witnesses


def check_normality(k, g, observable):
    """Is the closure of ``L(k)`` equal to ``P⁻¹P(closure) ∩ L(g)``?

    Builds the product of ``k`` and ``g`` with a dump state collecting plant
    moves that leave ``k``; the language is normal iff no observer estimate
    of that product mixes the dump with a genuine ``k`` state.
    """
    if k.is_empty():
        return True
    k, g, order, parent = _product_walk(k, g)
    index = {pair: i for i, pair in enumerate(order)}
    dump = len(order)
    delta = []
    for ki, gi in order:
        krow = k._delta[ki]
        row = {}
        for e, gt in g._delta[gi].items():
            kt = krow.get(e)
            row[e] = (dump,) if kt is None else (index[(kt[0], gt[0])],)
        delta.append(row)
    delta.append({})
    labels = list(range(dump + 1))
    events = k.events | g.events
    combined = Automaton._raw(labels, events, delta, 0, [dump])
    obs = observer(combined, frozenset(observable) & events)
    for subset in obs.states:
        if dump in subset and len(subset) > 1:
            return False
    return True


# -- supCN -------------------------------------------------------------------

def _empty_result(events):
    return SynthesisResult(Automaton.empty(events, "H_a^CN"), False)


def supcn(h, g, p, name="H_a^CN"):
    """Supremal controllable and normal sublanguage of ``L_m(h)`` w.r.t. ``g``.

    ``h`` and ``g`` must share an alphabet (build specs by composing with
    the plant). The result is trim; its states are labelled
    ``(h_state, g_state, estimate_id)``.
    """
    if h.events != g.events:
        raise AlphabetMismatch(
            f"spec and plant alphabets differ on {sorted(h.events ^ g.events)}")
    p.validate(g.events)
    events = g.events
    h = trim(determinize(h))
    if h.is_empty() or g.is_empty():
        return _empty_result(events)
    g = determinize(g)
    unobs = frozenset(events - p.observable)
    unctrl = frozenset(events - p.controllable)

    # (A) reachable pairs of h and g; A-edges are moves enabled in both,
    # dump events are plant moves that leave the spec.
    hd, gd = h._delta, g._delta
    start = (h._init, g._init)
    pair_index = {start: 0}
    pairs = [start]
    a_delta = []
    dumps = []
    queue = deque([start])
    while queue:
        hi, gi = queue.popleft()
        hrow = hd[hi]
        row = {}
        dump = []
        for e, gt in gd[gi].items():
            ht = hrow.get(e)
            if ht is None:
                dump.append(e)
                continue
            nxt = (ht[0], gt[0])
            j = pair_index.get(nxt)
            if j is None:
                j = pair_index[nxt] = len(pairs)
                pairs.append(nxt)
                queue.append(nxt)
            row[e] = (j,)
        a_delta.append(row)
        dumps.append(frozenset(dump))

    unobs_sorted = tuple(sorted(unobs))

    # (B) observer estimates over the pair graph. An estimate is poisoned
    # when some member can leave the spec unobservably.
    est_index = {}
    estimates = []
    poisoned = []

    def estimate_id(seeds):
        z = _unobservable_reach(a_delta, seeds, unobs_sorted)
        zid = est_index.get(z)
        if zid is None:
            zid = est_index[z] = len(estimates)
            estimates.append(z)
            poisoned.append(any(not dumps[x].isdisjoint(unobs) for x in z))
        return zid

    step_cache = {}

    def step(zid, e):
        key = (zid, e)
        res = step_cache.get(key)
        if res is None:
            z = estimates[zid]
            targets = []
            bad = False
            for x in z:
                t = a_delta[x].get(e)
                if t is not None:
                    targets.append(t[0])
                elif e in dumps[x]:
                    bad = True
            if bad:
                res = -1
            else:
                nz = estimate_id(targets)
                res = -1 if poisoned[nz] else nz
            step_cache[key] = res
        return res

    z0 = estimate_id([0])
    if poisoned[z0]:
        return _empty_result(events)

    # refined automaton R over (pair, estimate)
    DEAD = -1
    r_index = {(0, z0): 0}
    r_nodes = [(0, z0)]
    r_delta = []
    members = {z0: [0]}
    queue = deque([0])
    while queue:
        r = queue.popleft()
        x, zid = r_nodes[r]
        row = {}
        for e, (y,) in a_delta[x].items():
            if e in unobs:
                nz = zid
            else:
                nz = step(zid, e)
                if nz == DEAD:
                    row[e] = DEAD
                    continue
            key = (y, nz)
            j = r_index.get(key)
            if j is None:
                j = r_index[key] = len(r_nodes)
                r_nodes.append(key)
                members.setdefault(nz, []).append(j)
                queue.append(j)
            row[e] = j
        r_delta.append(row)

    n = len(r_nodes)
    alive = bytearray(b"\x01") * n
    preds_unctrl = [[] for _ in range(n)]
    for r, row in enumerate(r_delta):
        for e, j in row.items():
            if j != DEAD and e in unctrl:
                preds_unctrl[j].append(r)

    worklist = []

    def kill(r):
        if alive[r]:
            alive[r] = 0
            worklist.append(r)

    for r in range(n):
        x, _ = r_nodes[r]
        if not dumps[x].isdisjoint(unctrl):
            kill(r)
            continue
        for e, j in r_delta[r].items():
            if j == DEAD and e in unctrl:
                kill(r)
                break

    killed_classes = set()
    h_marked = h._marked
    marked_r = [r for r in range(n) if pairs[r_nodes[r][0]][0] in h_marked]

    while True:
        while worklist:
            r = worklist.pop()
            zid = r_nodes[r][1]
            if zid not in killed_classes:
                killed_classes.add(zid)
                for m in members[zid]:
                    kill(m)
            for q in preds_unctrl[r]:
                kill(q)
        # coaccessibility among alive states
        back = [[] for _ in range(n)]
        for r in range(n):
            if alive[r]:
                for j in r_delta[r].values():
                    if j != DEAD and alive[j]:
                        back[j].append(r)
        seen = bytearray(n)
        stack = [r for r in marked_r if alive[r]]
        for r in stack:
            seen[r] = 1
        while stack:
            r = stack.pop()
            for q in back[r]:
                if not seen[q]:
                    seen[q] = 1
                    stack.append(q)
        for r in range(n):
            if alive[r] and not seen[r]:
                kill(r)
        if not worklist:
            break

    if not alive[0]:
        return _empty_result(events)

    # keep alive states reachable from the initial one through alive states
    keep = bytearray(n)
    keep[0] = 1
    stack = [0]
    while stack:
        r = stack.pop()
        for j in r_delta[r].values():
            if j != DEAD and alive[j] and not keep[j]:
                keep[j] = 1
                stack.append(j)

    new_of = {}
    labels = []
    plant_state = {}
    for r in range(n):
        if keep[r]:
            new_of[r] = len(labels)
            x, zid = r_nodes[r]
            hi, gi = pairs[x]
            lab = (h._labels[hi], g._labels[gi], zid)
            labels.append(lab)
            plant_state[lab] = g._labels[gi]
    delta = []
    disable = False
    for r in new_of:
        row = {}
        for e, j in r_delta[r].items():
            if j != DEAD and keep[j]:
                row[e] = (new_of[j],)
        delta.append(row)
        gi = pairs[r_nodes[r][0]][1]
        if len(row) != len(gd[gi]):
            disable = True
    marked = [new_of[r] for r in marked_r if keep[r]]
    result = Automaton._raw(labels, events, delta, 0, marked, name)
    return SynthesisResult(result, disable, Classification.FOR_ALL, plant_state)


def disablement_needed(result, g):
    """True iff ``L(supCN) ≠ L(g)``."""
    if result.is_empty:
        return not g.is_empty()
    return result.disablement_needed


def classify(result, h, g, p, h_all_marked=None):
    """ForAll / ThereExistsOnly / NoAttack for a finished synthesis.

    An empty result is retried with every state marked, which drops the
    nonblocking requirement. ``h_all_marked`` is the spec to retry with;
    pass the untrimmed composition so that blocking states stay in the
    spec. Without it ``mark_all(h)`` is used. A non-empty retry that
    reaches an originally marked ``h`` state means the attacker can
    sometimes win.
    """
    if not result.is_empty:
        return Classification.FOR_ALL
    behaviour = relaxed_marked_behavior(h, g, p, h_all_marked)
    if behaviour.num_marked:
        return Classification.THERE_EXISTS_ONLY
    return Classification.NO_ATTACK


def relaxed_marked_behavior(h, g, p, h_all_marked=None):
    """Controlled behaviour of the all-marked rerun, marked where ``h`` is marked."""
    spec = mark_all(h if h_all_marked is None else h_all_marked)
    relaxed = supcn(spec, mark_all(g), p, name="H_a^CN,all-marked")
    a = relaxed.supcn
    if a.is_empty():
        return a
    h_marked = h.marked
    marked = [i for i, lab in enumerate(a.states) if lab[0] in h_marked]
    return Automaton._raw(a._labels, a.events, a._delta, a._init, marked, a.name)


# -- realization -------------------------------------------------------------

def realize(h_cn, g, p):
    """Observer of ``h_cn`` with self-loops for enabled unobservable controllable events."""
    if h_cn.is_empty():
        raise EmptySupervisor("cannot realize an empty supervisor")
    observable = frozenset(p.observable) & h_cn.events
    obs = observer(h_cn, observable, name="S_P")
    cuo = sorted((p.controllable - observable) & h_cn.events)
    enabled_map = {}
    delta = []
    for i, lab in enumerate(obs.states):
        row = dict(obs._delta[i])
        enabled = set()
        for s in lab:
            enabled.update(h_cn.active_events(s))
        enabled_map[lab] = frozenset(enabled & p.controllable)
        for e in cuo:
            if e in enabled:
                row[e] = (i,)
        delta.append(row)
    events = observable | frozenset(cuo)
    auto = Automaton._raw(obs._labels, events, delta, obs._init, range(obs.num_states), "S_P")
    return SupervisorRealization(auto, enabled_map, h_cn)


def controlled_behavior(r, g):
    """``S_P/G``: realization in parallel with the plant, marked by the supervisor's spec."""
    closed = compose(r.automaton, g, name="S_P/G")
    return mark_product(closed, r.marking, name="S_P/G")
