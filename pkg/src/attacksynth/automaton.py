"""Finite-state automata with marked states and the usual DES operations.

States carry hashable labels (strings for component models, tuples for
composites, sorted tuples for observer subset-states). Internally every
automaton stores states as integer indices into ``labels`` so the large TCP
compositions stay cheap; the public functions all speak labels.

Automata are treated as immutable values. Every operation returns a new one.
"""

from collections import deque
from itertools import product as _cartesian

from .errors import AlphabetMismatch, NondeterministicInput, UnknownState

DEAD = "__dead__"


class Automaton:
    """Possibly nondeterministic automaton ``(X, E, f, x0, Xm)``.

    ``transitions`` is an iterable of ``(source, event, target)`` label
    triples. The empty automaton has no states and ``initial=None``.
    """

    __slots__ = ("name", "events", "_labels", "_delta", "_init", "_marked", "_index")

    def __init__(self, states, events, transitions, initial, marked=(), name=""):
        labels = tuple(dict.fromkeys(states))
        index = {lab: i for i, lab in enumerate(labels)}
        events = frozenset(events)
        delta = [dict() for _ in labels]
        for src, ev, dst in transitions:
            if ev not in events:
                raise ValueError(f"event {ev!r} not in alphabet")
            try:
                i, j = index[src], index[dst]
            except KeyError as exc:
                raise UnknownState(f"transition endpoint {exc.args[0]!r} is not a state") from None
            row = delta[i]
            old = row.get(ev, ())
            if j not in old:
                row[ev] = old + (j,)
        if labels:
            if initial not in index:
                raise UnknownState(f"initial state {initial!r} is not a state")
            init = index[initial]
        else:
            init = None
        marked_idx = set()
        for m in marked:
            if m not in index:
                raise UnknownState(f"marked state {m!r} is not a state")
            marked_idx.add(index[m])
        self._setup(labels, events, delta, init, frozenset(marked_idx), name, index)

    def _setup(self, labels, events, delta, init, marked, name, index=None):
        self.name = name
        self.events = events
        self._labels = labels
        self._delta = delta
        self._init = init
        self._marked = marked
        self._index = index

    @classmethod
    def _raw(cls, labels, events, delta, init, marked, name=""):
        obj = cls.__new__(cls)
        obj._setup(tuple(labels), frozenset(events), delta, init, frozenset(marked), name)
        return obj

    @classmethod
    def empty(cls, events=(), name=""):
        return cls._raw((), events, [], None, (), name)

    # -- label-level views -------------------------------------------------

    @property
    def states(self):
        return self._labels

    @property
    def initial(self):
        return None if self._init is None else self._labels[self._init]

    @property
    def marked(self):
        return frozenset(self._labels[i] for i in self._marked)

    @property
    def num_states(self):
        return len(self._labels)

    @property
    def num_marked(self):
        return len(self._marked)

    @property
    def num_transitions(self):
        return sum(len(t) for row in self._delta for t in row.values())

    def is_empty(self):
        return not self._labels

    def index_of(self, label):
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self._labels)}
        try:
            return self._index[label]
        except KeyError:
            raise UnknownState(f"{label!r} is not a state") from None

    def has_state(self, label):
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self._labels)}
        return label in self._index

    def is_marked(self, label):
        return self.index_of(label) in self._marked

    def transitions(self):
        labels = self._labels
        for i, row in enumerate(self._delta):
            for ev, targets in row.items():
                for j in targets:
                    yield labels[i], ev, labels[j]

    def active_events(self, label):
        return frozenset(self._delta[self.index_of(label)])

    def successors(self, label, event):
        row = self._delta[self.index_of(label)]
        return frozenset(self._labels[j] for j in row.get(event, ()))

    def is_deterministic(self):
        return all(len(t) == 1 for row in self._delta for t in row.values())

    def with_name(self, name):
        return Automaton._raw(self._labels, self.events, self._delta, self._init, self._marked, name)

    def __repr__(self):
        return (f"Automaton({self.name!r}, states={self.num_states}, "
                f"marked={self.num_marked}, events={len(self.events)})")

    def __eq__(self, other):
        """Structural equality on labels (same states, marking, transitions)."""
        if not isinstance(other, Automaton):
            return NotImplemented
        return (self.events == other.events
                and set(self._labels) == set(other._labels)
                and self.initial == other.initial
                and self.marked == other.marked
                and set(self.transitions()) == set(other.transitions()))

    __hash__ = None


# -- reachability ------------------------------------------------------------

def _forward_closure(a, seeds, alive=None):
    seen = bytearray(len(a._labels))
    stack = []
    for s in seeds:
        if not seen[s] and (alive is None or alive[s]):
            seen[s] = 1
            stack.append(s)
    delta = a._delta
    while stack:
        i = stack.pop()
        for targets in delta[i].values():
            for j in targets:
                if not seen[j] and (alive is None or alive[j]):
                    seen[j] = 1
                    stack.append(j)
    return seen


def _predecessors(a):
    preds = [[] for _ in a._labels]
    for i, row in enumerate(a._delta):
        for targets in row.values():
            for j in targets:
                preds[j].append(i)
    return preds


def _backward_closure(a, seeds, preds=None):
    if preds is None:
        preds = _predecessors(a)
    seen = bytearray(len(a._labels))
    stack = []
    for s in seeds:
        if not seen[s]:
            seen[s] = 1
            stack.append(s)
    while stack:
        j = stack.pop()
        for i in preds[j]:
            if not seen[i]:
                seen[i] = 1
                stack.append(i)
    return seen


def _restrict(a, keep, name=None):
    """Sub-automaton on the states flagged in ``keep`` (an indexable of bools)."""
    if a._init is None or not keep[a._init]:
        return Automaton.empty(a.events, a.name if name is None else name)
    new_of = {}
    labels = []
    for i, lab in enumerate(a._labels):
        if keep[i]:
            new_of[i] = len(labels)
            labels.append(lab)
    delta = []
    for i in new_of:
        row = {}
        for ev, targets in a._delta[i].items():
            kept = tuple(new_of[j] for j in targets if j in new_of)
            if kept:
                row[ev] = kept
        delta.append(row)
    marked = [new_of[i] for i in a._marked if i in new_of]
    return Automaton._raw(labels, a.events, delta, new_of[a._init], marked,
                          a.name if name is None else name)


def accessible(a):
    if a._init is None:
        return a
    return _restrict(a, _forward_closure(a, [a._init]))


def coaccessible(a):
    """Restriction to states that can reach a marked state.

    If the initial state is not coaccessible the result is the empty
    automaton (an automaton needs an initial state).
    """
    if a._init is None:
        return a
    return _restrict(a, _backward_closure(a, a._marked))


def trim(a):
    return coaccessible(accessible(a))


def is_accessible(a):
    return a._init is None or all(_forward_closure(a, [a._init]))


def is_trim(a):
    if a._init is None:
        return True
    reach = _forward_closure(a, [a._init])
    coreach = _backward_closure(a, a._marked)
    return all(reach) and all(coreach)


# -- composition ---------------------------------------------------------------

def compose(*automata, name=""):
    """Parallel composition of any number of automata in one pass.

    States of the result are flat tuples with one component label per factor;
    only the reachable part is built. A state is marked iff every component
    is marked.
    """
    if not automata:
        raise ValueError("compose needs at least one automaton")
    events = frozenset().union(*(a.events for a in automata))
    if any(a._init is None for a in automata):
        return Automaton.empty(events, name)
    n = len(automata)
    owners = {e: tuple(k for k, a in enumerate(automata) if e in a.events) for e in events}
    deltas = [a._delta for a in automata]
    markeds = [a._marked for a in automata]
    comp_labels = [a._labels for a in automata]

    start = tuple(a._init for a in automata)
    index = {start: 0}
    order = [start]
    delta = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        rows = [deltas[k][cur[k]] for k in range(n)]
        cand = set()
        for r in rows:
            cand.update(r)
        out = {}
        for e in cand:
            own = owners[e]
            choices = []
            for k in own:
                t = rows[k].get(e)
                if t is None:
                    break
                choices.append(t)
            else:
                if all(len(c) == 1 for c in choices):
                    nxt = list(cur)
                    for k, c in zip(own, choices):
                        nxt[k] = c[0]
                    succs = [tuple(nxt)]
                else:
                    succs = []
                    for combo in _cartesian(*choices):
                        nxt = list(cur)
                        for k, c in zip(own, combo):
                            nxt[k] = c
                        succs.append(tuple(nxt))
                targets = []
                for s in succs:
                    j = index.get(s)
                    if j is None:
                        j = index[s] = len(order)
                        order.append(s)
                        queue.append(s)
                    targets.append(j)
                out[e] = tuple(dict.fromkeys(targets))
        delta.append(out)
    labels = [tuple(comp_labels[k][s[k]] for k in range(n)) for s in order]
    marked = [i for i, s in enumerate(order) if all(s[k] in markeds[k] for k in range(n))]
    return Automaton._raw(labels, events, delta, 0, marked, name)


def parallel(a, b, name=""):
    """Synchronous composition on shared events, interleaving on private ones."""
    return compose(a, b, name=name)


def product(a, b, name=""):
    """Completely synchronous product; both automata must share one alphabet."""
    if a.events != b.events:
        raise AlphabetMismatch(
            f"product needs equal alphabets; differ on {sorted(a.events ^ b.events)}")
    return compose(a, b, name=name)


def mark_product(a, spec, name=""):
    """Lock-step product of ``a`` with ``spec`` over ``a``'s alphabet, marked by ``spec`` alone.

    Used to impose a marking language on a generated behaviour
    (``L_m = L(a) ∩ L_m(spec)``). Events of ``a`` outside ``spec``'s alphabet
    are treated as self-loops in ``spec``.
    """
    if a._init is None or spec._init is None:
        return Automaton.empty(a.events, name)
    a_all_marked = Automaton._raw(a._labels, a.events, a._delta, a._init,
                                  range(len(a._labels)), a.name)
    return compose(a_all_marked, spec, name=name)


# -- observers -------------------------------------------------------------

def _label_key(label):
    return repr(label)


def _unobservable_reach(delta, seeds, unobservable):
    reach = set(seeds)
    stack = list(seeds)
    while stack:
        i = stack.pop()
        row = delta[i]
        for e in unobservable:
            t = row.get(e)
            if t:
                for j in t:
                    if j not in reach:
                        reach.add(j)
                        stack.append(j)
    return frozenset(reach)


def observer(a, observable, name=""):
    """Observer (subset construction after unobservable reach) over ``observable``.

    Each state is labelled by the sorted tuple of its constituent labels and
    is marked iff one of them is marked.
    """
    observable = frozenset(observable)
    if not observable <= a.events:
        raise ValueError(f"observable events {sorted(observable - a.events)} not in alphabet")
    if a._init is None:
        return Automaton.empty(observable, name)
    unobservable = tuple(sorted(a.events - observable))
    obs_sorted = sorted(observable)
    delta_a = a._delta
    start = _unobservable_reach(delta_a, [a._init], unobservable)
    index = {start: 0}
    order = [start]
    delta = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        out = {}
        for e in obs_sorted:
            nxt = set()
            for i in cur:
                t = delta_a[i].get(e)
                if t:
                    nxt.update(t)
            if not nxt:
                continue
            z = _unobservable_reach(delta_a, nxt, unobservable)
            j = index.get(z)
            if j is None:
                j = index[z] = len(order)
                order.append(z)
                queue.append(z)
            out[e] = (j,)
        delta.append(out)
    labels = [tuple(sorted((a._labels[i] for i in z), key=_label_key)) for z in order]
    marked = [k for k, z in enumerate(order) if not z.isdisjoint(a._marked)]
    return Automaton._raw(labels, observable, delta, 0, marked, name)


def determinize(a, name=""):
    if a.is_deterministic():
        return a
    return observer(a, a.events, name=name or a.name)


def project_events(a, observable):
    """Natural projection as an automaton: observer over ``observable``."""
    return observer(a, observable)


# -- complement --------------------------------------------------------------

def complement(a, name=""):
    """Complete ``a`` with a fresh dead state and swap marked/unmarked states.

    ``L_m(complement(a)) = E* \\ L_m(a)`` over ``a``'s alphabet.
    """
    if not a.is_deterministic():
        raise NondeterministicInput("complement needs a deterministic automaton")
    events = sorted(a.events)
    if a._init is None:
        delta = [{e: (0,) for e in events}]
        return Automaton._raw((DEAD,), a.events, delta, 0, (0,), name)
    dead_label = DEAD
    while a.has_state(dead_label):
        dead_label = "_" + dead_label
    n = len(a._labels)
    delta = []
    for row in a._delta:
        new = dict(row)
        for e in events:
            if e not in new:
                new[e] = (n,)
        delta.append(new)
    delta.append({e: (n,) for e in events})
    marked = [i for i in range(n) if i not in a._marked] + [n]
    return Automaton._raw(a._labels + (dead_label,), a.events, delta, a._init, marked, name)


# -- blocking analysis ----------------------------------------------------------

def deadlock_states(a):
    """Reachable, unmarked states with no outgoing transition (labels)."""
    if a._init is None:
        return frozenset()
    reach = _forward_closure(a, [a._init])
    return frozenset(a._labels[i] for i, row in enumerate(a._delta)
                     if reach[i] and not row and i not in a._marked)


def _sccs(a, nodes):
    """Iterative Tarjan over the subgraph induced by ``nodes`` (a set of indices)."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    delta = a._delta
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([j for t in delta[root].values() for j in t]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in nodes:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([j for t in delta[w].values() for j in t])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def livelock_states(a):
    """Reachable states on a cycle from which no marked state is reachable."""
    if a._init is None:
        return frozenset()
    reach = _forward_closure(a, [a._init])
    coreach = _backward_closure(a, a._marked)
    blocked = {i for i in range(len(a._labels)) if reach[i] and not coreach[i]}
    out = set()
    for comp in _sccs(a, blocked):
        if len(comp) > 1:
            out.update(comp)
        else:
            v = comp[0]
            if any(v in t for t in a._delta[v].values()):
                out.add(v)
    return frozenset(a._labels[i] for i in out)


livelock_report = livelock_states


def blocking_states(a):
    """Reachable states that cannot reach a marked state."""
    if a._init is None:
        return frozenset()
    reach = _forward_closure(a, [a._init])
    coreach = _backward_closure(a, a._marked)
    return frozenset(a._labels[i] for i in range(len(a._labels)) if reach[i] and not coreach[i])


# -- marking and relabelling ---------------------------------------------------

def remark(a, marked, name=None):
    idx = [a.index_of(m) for m in marked]
    return Automaton._raw(a._labels, a.events, a._delta, a._init, idx,
                          a.name if name is None else name)


def unmark_all(a, name=None):
    return Automaton._raw(a._labels, a.events, a._delta, a._init, (),
                          a.name if name is None else name)


def mark_all(a, name=None):
    return Automaton._raw(a._labels, a.events, a._delta, a._init, range(len(a._labels)),
                          a.name if name is None else name)


def rename_events(a, mapping, name=None):
    """Relabel events; several old events may map onto one new event."""
    events = frozenset(mapping.get(e, e) for e in a.events)
    delta = []
    for row in a._delta:
        new = {}
        for e, targets in row.items():
            e2 = mapping.get(e, e)
            if e2 in new:
                new[e2] = tuple(dict.fromkeys(new[e2] + targets))
            else:
                new[e2] = targets
        delta.append(new)
    return Automaton._raw(a._labels, events, delta, a._init, a._marked,
                          a.name if name is None else name)


def relabel_states(a, fn, name=None):
    labels = [fn(lab) for lab in a._labels]
    if len(set(labels)) != len(labels):
        raise ValueError("state relabelling is not injective")
    return Automaton._raw(labels, a.events, a._delta, a._init, a._marked,
                          a.name if name is None else name)


def add_transitions(a, extra, name=None):
    """Copy of ``a`` with the extra ``(source, event, target)`` label triples added."""
    events = set(a.events)
    delta = [dict(row) for row in a._delta]
    for src, ev, dst in extra:
        events.add(ev)
        i, j = a.index_of(src), a.index_of(dst)
        old = delta[i].get(ev, ())
        if j not in old:
            delta[i][ev] = old + (j,)
    return Automaton._raw(a._labels, events, delta, a._init, a._marked,
                          a.name if name is None else name)


def remove_transitions(a, drop, name=None):
    """Copy of ``a`` without the given ``(source, event, target)`` label triples."""
    delta = [dict(row) for row in a._delta]
    for src, ev, dst in drop:
        i, j = a.index_of(src), a.index_of(dst)
        old = delta[i].get(ev, ())
        if j not in old:
            raise ValueError(f"no transition {src!r} -{ev}-> {dst!r}")
        kept = tuple(k for k in old if k != j)
        if kept:
            delta[i][ev] = kept
        else:
            del delta[i][ev]
    return Automaton._raw(a._labels, a.events, delta, a._init, a._marked,
                          a.name if name is None else name)


# -- language queries ---------------------------------------------------------

def marked_string_exists(a):
    if a._init is None or not a._marked:
        return False
    return any(_forward_closure(a, [a._init])[i] for i in a._marked)


def shortest_marked_string(a):
    """Shortest marked string, ties broken lexicographically on event names.

    Returns a tuple of event names, or None when the marked language is empty.
    """
    if a._init is None:
        return None
    parent = {a._init: None}
    queue = deque([a._init])
    while queue:
        i = queue.popleft()
        if i in a._marked:
            path = []
            while parent[i] is not None:
                i, e = parent[i]
                path.append(e)
            return tuple(reversed(path))
        row = a._delta[i]
        for e in sorted(row):
            for j in row[e]:
                if j not in parent:
                    parent[j] = (i, e)
                    queue.append(j)
    return None


def run(a, string):
    """Set of state indices reached by ``string`` (empty if it is not generated)."""
    if a._init is None:
        return frozenset()
    cur = {a._init}
    for e in string:
        nxt = set()
        for i in cur:
            nxt.update(a._delta[i].get(e, ()))
        if not nxt:
            return frozenset()
        cur = nxt
    return frozenset(cur)


def contains(a, string):
    """``(in_generated, in_marked)`` for a sequence of event names."""
    reached = run(a, string)
    return bool(reached), any(i in a._marked for i in reached)


def parse_string(text):
    """Split ``e1.e2.e3`` into a tuple of event names; empty text is the empty string."""
    text = text.strip()
    return tuple(text.split(".")) if text else ()


def strings_up_to(a, length, marked_only=False):
    """All strings of ``L(a)`` (or ``L_m(a)``) with at most ``length`` events."""
    out = set()
    if a._init is None:
        return out
    frontier = {(): frozenset([a._init])}
    for depth in range(length + 1):
        nxt = {}
        for s, cur in frontier.items():
            if not marked_only or not cur.isdisjoint(a._marked):
                out.add(s)
            if depth == length:
                continue
            by_event = {}
            for i in cur:
                for e, t in a._delta[i].items():
                    by_event.setdefault(e, set()).update(t)
            for e, t in by_event.items():
                nxt[s + (e,)] = frozenset(t)
        frontier = nxt
    return out


def generated_language_equal(a, b):
    """Equality of prefix-closed generated languages (deterministic inputs)."""
    return _lang_equal(a, b, marked=False)


def marked_language_equal(a, b):
    return _lang_equal(a, b, marked=True)


def _lang_equal(a, b, marked):
    da, db = determinize(a), determinize(b)
    if marked:
        da, db = trim(da), trim(db)
    if da._init is None or db._init is None:
        return da._init is None and db._init is None
    seen = {(da._init, db._init)}
    queue = deque(seen)
    while queue:
        i, j = queue.popleft()
        if marked and ((i in da._marked) != (j in db._marked)):
            return False
        ra, rb = da._delta[i], db._delta[j]
        if ra.keys() != rb.keys():
            return False
        for e in ra:
            pair = (ra[e][0], rb[e][0])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True


def marked_language_included(a, b):
    """``L_m(a) ⊆ L_m(b)`` via emptiness of ``L_m(a) ∩ complement(L_m(b))``."""
    events = a.events | b.events
    da = _widen(determinize(a), events)
    db = _widen(determinize(b), events)
    diff = product(da, complement(db))
    return not marked_string_exists(diff)


def _widen(a, events):
    if a.events == events:
        return a
    return Automaton._raw(a._labels, events, a._delta, a._init, a._marked, a.name)


def minimize(a, name=None):
    """Minimal deterministic automaton for ``L_m(a)`` restricted to ``trim(a)``.

    States are labelled ``0..n-1`` in breadth-first order with sorted events,
    so language-equal inputs give structurally identical outputs.
    """
    d = trim(determinize(a))
    if d._init is None:
        return Automaton.empty(a.events, a.name if name is None else name)
    n = len(d._labels)
    events = sorted(d.events)
    block = [1 if i in d._marked else 0 for i in range(n)]
    while True:
        sig = {}
        new_block = []
        for i in range(n):
            row = d._delta[i]
            key = (block[i],) + tuple(block[row[e][0]] if e in row else -1 for e in events)
            new_block.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            block = new_block
            break
        block = new_block
    # canonical BFS numbering of blocks
    rep = {}
    for i in range(n):
        rep.setdefault(block[i], i)
    order = {block[d._init]: 0}
    queue = deque([block[d._init]])
    delta = []
    while queue:
        b = queue.popleft()
        row = d._delta[rep[b]]
        out = {}
        for e in events:
            if e in row:
                tb = block[row[e][0]]
                if tb not in order:
                    order[tb] = len(order)
                    queue.append(tb)
                out[e] = (order[tb],)
        delta.append(out)
    marked = [order[block[i]] for i in d._marked]
    return Automaton._raw(range(len(order)), a.events, delta, 0, set(marked),
                          a.name if name is None else name)


def isomorphic(a, b):
    """Isomorphism test for deterministic, accessible automata (paired BFS)."""
    if a.events != b.events or a.num_states != b.num_states or a.num_marked != b.num_marked:
        return False
    if a._init is None:
        return b._init is None
    if not (a.is_deterministic() and b.is_deterministic()):
        raise NondeterministicInput("isomorphism test needs deterministic automata")
    fwd = {a._init: b._init}
    bwd = {b._init: a._init}
    queue = deque([a._init])
    while queue:
        i = queue.popleft()
        j = fwd[i]
        if (i in a._marked) != (j in b._marked):
            return False
        ra, rb = a._delta[i], b._delta[j]
        if ra.keys() != rb.keys():
            return False
        for e, t in ra.items():
            ti, tj = t[0], rb[e][0]
            if ti in fwd:
                if fwd[ti] != tj:
                    return False
            else:
                if tj in bwd:
                    return False
                fwd[ti] = tj
                bwd[tj] = ti
                queue.append(ti)
    return len(fwd) == a.num_states
