"""Independent reference implementations used only by the tests.

These are deliberately naive: string-set fixpoints for tiny finite
languages, and a textbook alternating normal/controllable iteration on
automata for the mid-sized case-study instances.
"""

from itertools import product as cartesian

from attacksynth.automaton import (Automaton, compose, determinize, isomorphic, mark_all,
                                   minimize, observer, strings_up_to, trim)


def prefixes(s):
    return [s[:i] for i in range(len(s) + 1)]


def project(s, observable):
    return tuple(e for e in s if e in observable)


def language(a, length, marked_only=False):
    return set(strings_up_to(a, length, marked_only))


def brute_supcn(k, closed_g, uncontrollable, observable):
    """Greatest controllable and normal subset of the finite language ``k``.

    ``closed_g`` is the complete (finite, prefix-closed) plant language.
    """
    by_proj = {}
    for v in closed_g:
        by_proj.setdefault(project(v, observable), []).append(v)
    ext = {}
    for v in closed_g:
        if v:
            ext.setdefault(v[:-1], []).append(v[-1])
    cur = set(k)
    while True:
        closure = {p for s in cur for p in prefixes(s)}
        bad = set()
        for u in closure:
            if any(e in uncontrollable and u + (e,) not in closure for e in ext.get(u, ())):
                bad.add(u)
            elif any(v not in closure for v in by_proj.get(project(u, observable), ())):
                bad.add(u)
        nxt = {s for s in cur if not any(p in bad for p in prefixes(s))}
        if nxt == cur:
            return cur
        cur = nxt


def is_controllable_bf(k, closed_g, uncontrollable):
    closure = {p for s in k for p in prefixes(s)}
    return all(not (v[-1] in uncontrollable and v[:-1] in closure and v not in closure)
               for v in closed_g if v)


def is_normal_bf(k, closed_g, observable):
    closure = {p for s in k for p in prefixes(s)}
    seen = {project(u, observable) for u in closure}
    return all(v in closure for v in closed_g if project(v, observable) in seen)


def _strip(a):
    return minimize(trim(a))


def _dumped_product(k, g):
    """``k`` lock-step with ``g`` plus a sink state for plant moves outside ``k``."""
    prod = compose(k, g)
    dump = "__out__"
    trans = list(prod.transitions())
    for (ks, gs) in prod.states:
        kev = k.active_events(ks)
        for e in g.active_events(gs):
            if e not in kev:
                trans.append(((ks, gs), e, dump))
    return Automaton(list(prod.states) + [dump], prod.events, trans, prod.initial,
                     prod.marked, name="K+dump"), dump


def alternating_supcn(h, g, uncontrollable, observable, max_rounds=100):
    """Textbook iteration: supremal normal pass, supremal controllable pass, repeat."""
    # marking comes from the spec alone
    g = mark_all(determinize(g))
    k = _strip(h)
    for _ in range(max_rounds):
        if k.is_empty():
            return k
        before = k
        # normal pass: drop strings whose observation is shared with an escape
        dumped, dump = _dumped_product(k, g)
        obs = observer(dumped, observable)
        poisoned = {s for s in obs.states if dump in s}
        lifted = compose(k, obs)
        keep = [s for s in lifted.states if s[1] not in poisoned]
        lifted = _restrict_labels(lifted, keep)
        k = _strip(lifted)
        if k.is_empty():
            return k
        # controllable pass: iterate state removal on the plant product
        while True:
            prod = compose(k, g)
            bad = set()
            for (ks, gs) in prod.states:
                kev = k.active_events(ks)
                if any(e in uncontrollable and e not in kev for e in g.active_events(gs)):
                    bad.add((ks, gs))
            if not bad:
                break
            keep = [s for s in prod.states if s not in bad]
            k = _strip(_restrict_labels(prod, keep))
            if k.is_empty():
                return k
        if _same(before, k):
            return k
    raise RuntimeError("alternating iteration did not converge")


def _same(a, b):
    return isomorphic(minimize(a), minimize(b))


def _restrict_labels(a, keep):
    keep = set(keep)
    if a.initial not in keep:
        return Automaton.empty(a.events)
    trans = [(s, e, t) for s, e, t in a.transitions() if s in keep and t in keep]
    return Automaton([s for s in a.states if s in keep], a.events, trans, a.initial,
                     [m for m in a.marked if m in keep])


def random_automaton(draw_int, events, n_states, density, marked_p, acyclic=False):
    """Deterministic automaton from a supplied integer source (for hypothesis)."""
    states = list(range(n_states))
    trans = []
    for s, e in cartesian(states, sorted(events)):
        if draw_int(0, 99) < density:
            lo = s + 1 if acyclic else 0
            if lo >= n_states:
                continue
            trans.append((s, e, draw_int(lo, n_states - 1)))
    marked = [s for s in states if draw_int(0, 99) < marked_p]
    return Automaton(states, events, trans, 0, marked)


def bounded_language_equal(a, b, depth, marked=False):
    """Do ``a`` and ``b`` agree on all strings of length ``<= depth``?

    Paired layered walk over state *sets*, so neither input needs to be
    deterministic and no strings are enumerated.
    """
    if a.is_empty() or b.is_empty():
        return a.is_empty() and b.is_empty()
    layer = {(frozenset([a.initial]), frozenset([b.initial]))}
    seen = set(layer)
    for d in range(depth + 1):
        nxt = set()
        for xa, xb in layer:
            if marked and (any(a.is_marked(s) for s in xa) != any(b.is_marked(s) for s in xb)):
                return False
            ea = set().union(*(a.active_events(s) for s in xa))
            eb = set().union(*(b.active_events(s) for s in xb))
            if ea != eb:
                return False
            if d == depth:
                continue
            for e in ea:
                pair = (frozenset(t for s in xa for t in a.successors(s, e)),
                        frozenset(t for s in xb for t in b.successors(s, e)))
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
        layer = nxt
    return True


def observed_language(a, observable, length):
    """``(P(L(a)), P(L_m(a)))`` cut at ``length`` observed events.

    Worklist over (state, observed prefix) pairs; no subset construction.
    """
    if a.is_empty():
        return set(), set()
    start = (a.initial, ())
    seen = {start}
    stack = [start]
    while stack:
        q, w = stack.pop()
        for e in a.active_events(q):
            if e in observable:
                if len(w) == length:
                    continue
                w2 = w + (e,)
            else:
                w2 = w
            for t in a.successors(q, e):
                if (t, w2) not in seen:
                    seen.add((t, w2))
                    stack.append((t, w2))
    gen = {w for _, w in seen}
    marked = {w for q, w in seen if a.is_marked(q)}
    return gen, marked


def sync_language(parts, events, length):
    """Strings over ``events`` whose projection onto each part's alphabet is in that part."""
    out = set()
    frontier = [()]
    for _ in range(length + 1):
        nxt = []
        for s in frontier:
            ok = all(contains_string(p, tuple(e for e in s if e in p.events)) for p in parts)
            if ok:
                out.add(s)
                nxt.extend(s + (e,) for e in sorted(events))
        frontier = nxt
    return out


def contains_string(a, s):
    if a.is_empty():
        return False
    cur = {a.initial}
    for e in s:
        cur = {t for q in cur for t in a.successors(q, e)}
        if not cur:
            return False
    return True
