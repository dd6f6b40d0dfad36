"""Named end-to-end attack-synthesis pipelines for the ABP and TCP case studies.

Each scenario builds a plant, an attacker spec and an event partition,
validates the nominal model, synthesizes supCN and checks the outcome
against recorded expectations. Count mismatches are warnings; language
facts (emptiness, witnesses, disablement, classification, cross-scenario
comparisons) are hard checks.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache

from .automaton import (compose, contains, deadlock_states, generated_language_equal,
                        is_trim, isomorphic, livelock_states, marked_language_equal,
                        marked_language_included, minimize, parse_string, remark,
                        shortest_marked_string, strings_up_to, trim)
from .errors import (AlphabetMismatch, EmptyOperand, ModelIncorrect, PlantIsTrim,
                     UnknownScenario)
from .protocols import abp, tcp
from .specs import (PropertyKind, abp_liveness_monitor, abp_safety_monitor,
                    build_liveness_spec, build_liveness_spec_from_deadlocks,
                    build_safety_spec, tcp_tm1_monitor, validate_nominal)
from .supervisory import (Classification, EventPartition, check_controllability,
                          check_normality, classify, relaxed_marked_behavior, supcn)

REPORT_FORMAT_VERSION = 1


class Comparison(Enum):
    EQUAL = "Equal"
    STRICTLY_CONTAINS = "StrictlyContains"
    STRICTLY_CONTAINED = "StrictlyContainedIn"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class ExpectedReport:
    plant_states: int = None
    plant_marked: int = None
    spec_states: int = None
    spec_marked: int = None
    supcn_states: int = None
    supcn_marked: int = None
    supcn_empty: bool = None
    disablement_needed: bool = None
    witness: tuple = None
    classification: Classification = None
    # extras that only some setups report
    nominal_states: int = None
    nominal_marked: int = None
    nominal_trim: bool = None
    plant_trim: bool = None
    plant_deadlocks: int = None
    plant_livelocks: int = None


@dataclass
class Instance:
    """Everything a scenario pipeline produces before synthesis."""

    plant: object
    spec: object
    partition: EventPartition
    prop: PropertyKind
    nominal: object
    nominal_other: object = None
    monitor: object = None
    spec_all_marked: object = None


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    description: str
    build: object = field(repr=False)
    expected: ExpectedReport = None
    qualitative: bool = False
    # "relaxed": report the all-marked rerun instead of the plain synthesis
    relaxed: bool = False
    extra_checks: tuple = field(default=(), repr=False)


# -- ABP recipes ------------------------------------------------------------------

A = abp.Attack
ABP_PARTITION = EventPartition(abp.CONTROLLABLE, abp.OBSERVABLE)
ABP_W1 = parse_string("send.p0.p0_prime.deliver.a0.p1_prime.deliver")
ABP_W5 = parse_string(
    "send.p0.p0_prime.deliver.a0.a0_prime.done.send.p1.p1_prime.deliver.p1_prime.a1.a1_prime"
    ".done.send.p0.p0_prime.deliver.a0.a1_prime.p1_prime.timeout.p0.deliver")
ABP_W6 = parse_string("send.p0.p1_prime.a1.timeout")
ABP_BACKWARD = frozenset({abp.A0, abp.A1, abp.A0P, abp.A1P})


def _abp_safety(dead, forward, backward=A.NONE, partition=ABP_PARTITION, monitor=1):
    def build():
        flags = abp.AbpVariantFlags(dead, forward, backward)
        g = abp.build_plant(flags)
        sm = abp_safety_monitor(monitor)
        return Instance(plant=g, spec=build_safety_spec(g, sm), partition=partition,
                        prop=PropertyKind.safety(sm), nominal=abp.nominal_plant(dead),
                        monitor=sm)
    return build


def _abp_liveness():
    g = abp.build_plant(abp.AbpVariantFlags(False, A.FULL))
    lm = abp_liveness_monitor()
    return Instance(plant=g, spec=build_liveness_spec(g, lm), partition=ABP_PARTITION,
                    prop=PropertyKind.liveness(), nominal=abp.nominal_plant(False),
                    monitor=lm)


# -- TCP recipes --------------------------------------------------------------------

T = tcp.TcpVariantFlags
NA = tcp.NetworkAttack
TCP_W_TM1 = parse_string("SYN_BC3.SYN_C3N.SYN_ACK_NC4.SYN_ACK_C4B.ACK_BC3")
TCP_W_CF = parse_string("SYN_BN.SYN_NB.ACK_BN.ACK_NB")
TCP_W_WEAK = parse_string("SYN_BN.SYN_ACK_NB.ACK_BN")
TCP_W_TM2 = parse_string("SYN_AN.SYN_ACK_NA.ACK_AN.FIN_NA.SYN_BN.SYN_NB.ACK_AN")
TCP_W_TM3 = parse_string("listen_A.SYN_BN.SYN_NA.SYN_ACK_AN.ACK_NA.FIN_AN.ACK_NA")


def _tcp_partition(channel_free, controllable=None):
    ctrl = tcp.controllable_events(channel_free) if controllable is None else controllable
    return EventPartition(ctrl, tcp.observable_events(channel_free))


def _tcp_tm1(with_channels, timeout, attack, controllable=None):
    def build():
        cf = not with_channels
        flags = T(with_channels, timeout, attack)
        g = tcp.build_plant(flags)
        others_a = ([] if cf else tcp.channels()) + [tcp.network_for(flags)]
        others_nom = ([] if cf else tcp.channels()) + [tcp.network(cf)]
        g_other_a = compose(*others_a, name="G_other,a")
        g_other = compose(*others_nom, name="G_other")
        sm = tcp_tm1_monitor(cf, timeout)
        raw = compose(g_other_a, sm, name="H_a")
        return Instance(plant=g, spec=trim(raw), partition=_tcp_partition(cf, controllable),
                        prop=PropertyKind.safety(sm),
                        nominal=tcp.build_plant(T(with_channels, timeout), name="G_nom"),
                        nominal_other=g_other, monitor=sm, spec_all_marked=raw)
    return build


def _tcp_deadlock_spec(peer_a_marked, peer_b_marked):
    def build():
        flags = T(False, True, NA.FULL)
        g = tcp.build_plant(flags, peer_a_marked, peer_b_marked)
        nominal = tcp.build_plant(T(False, True), peer_a_marked, peer_b_marked, name="G_nom")
        return Instance(plant=g, spec=build_liveness_spec_from_deadlocks(g),
                        partition=_tcp_partition(True), prop=PropertyKind.liveness(),
                        nominal=nominal)
    return build


TM2_MARKING = (("established",), tcp.PEER_STATES)
TM3_MARKING = (("closed",), ("closed",))


# -- extra hard checks ------------------------------------------------------------------
# each takes (spec, outcome) and returns a list of (name, expected, actual)

def _check_strictly_inside(other_id):
    def check(scn, out):
        rel = compare_attack_strategies(other_id, scn.id)
        return [(f"{other_id} strictly contains {scn.id}",
                 Comparison.STRICTLY_CONTAINS.value, rel.value)]
    return check


def _check_same_as(other_id):
    def check(scn, out):
        mine = out["supcn"]
        theirs = synthesize(other_id)[1].supcn
        eq_m = marked_language_equal(mine, theirs)
        eq_g = generated_language_equal(mine, theirs)
        iso = isomorphic(minimize(mine), minimize(theirs))
        bounded = (set(strings_up_to(mine, 12, True)) == set(strings_up_to(theirs, 12, True)))
        return [(f"L_m equal to {other_id}", True, eq_m),
                (f"L equal to {other_id}", True, eq_g),
                (f"minimized isomorphic to {other_id}", True, iso),
                (f"L_m equal to {other_id} up to length 12", True, bounded)]
    return check


def _check_empty_when(label, observable=None, controllable=None):
    def check(scn, out):
        rep = run_variant(scn.id, observable=observable, controllable=controllable)
        return [(f"supCN empty when {label}", True, rep["supcn"]["empty"])]
    return check


def _check_no_event_in_controlled(event):
    def check(scn, out):
        present = any(e == event for _, e, _ in out["supcn"].transitions())
        return [(f"no {event} transition in controlled behaviour", False, present)]
    return check


def _check_sweep_drop(drop, label):
    def check(scn, out):
        rep = sweep_observability(scn.id, drop)
        return [(f"supCN empty when {label}", True, rep["supcn"]["empty"])]
    return check


# -- registry ----------------------------------------------------------------------

def _scenarios():
    E = ExpectedReport
    FA = Classification.FOR_ALL
    out = [
        ScenarioSpec(
            "abp/setup1", "ABP, dead transitions kept, forward channel fully attacked, safety monitor 1",
            _abp_safety(True, A.FULL),
            E(spec_states=355, spec_marked=258, supcn_empty=False, disablement_needed=False,
              witness=ABP_W1, classification=FA)),
        ScenarioSpec(
            "abp/setup2", "ABP, dead transitions removed, forward channel fully attacked",
            _abp_safety(False, A.FULL),
            E(spec_states=265, spec_marked=168, supcn_empty=False, disablement_needed=False,
              witness=ABP_W1, classification=FA)),
        ScenarioSpec(
            "abp/setup3", "ABP, weak forward attacker (single p1' insertion)",
            _abp_safety(False, A.WEAK),
            E(plant_states=248, spec_states=370, spec_marked=228, supcn_states=1099,
              supcn_marked=771, supcn_empty=False, disablement_needed=False, witness=ABP_W1,
              classification=FA),
            extra_checks=(_check_strictly_inside("abp/setup2"),)),
        ScenarioSpec(
            "abp/setup4", "ABP, Setup 2 plant, attacker sees and controls only the forward channel",
            _abp_safety(False, A.FULL, partition=EventPartition(
                {abp.P0P, abp.P1P}, abp.E_FC)),
            E(spec_states=265, spec_marked=168, supcn_empty=False, witness=ABP_W1,
              classification=FA),
            extra_checks=(_check_same_as("abp/setup2"),)),
        ScenarioSpec(
            "abp/setup5", "ABP, one-shot forward attacker controlling only p1'",
            _abp_safety(False, A.ONESHOT, partition=EventPartition({abp.P1P}, abp.OBSERVABLE)),
            E(plant_states=214, spec_states=270, spec_marked=78, supcn_empty=False,
              disablement_needed=True, witness=ABP_W5, classification=FA),
            extra_checks=(
                _check_sweep_drop(ABP_BACKWARD, "backward-channel events unobservable"),
                _check_empty_when("no event is controllable", controllable=frozenset()),
            )),
        ScenarioSpec(
            "abp/setup6", "ABP liveness: first send never delivered, forward channel fully attacked",
            _abp_liveness,
            E(plant_states=174, spec_states=14, spec_marked=13, supcn_states=10, supcn_marked=9,
              supcn_empty=False, disablement_needed=True, witness=ABP_W6, classification=FA),
            extra_checks=(_check_no_event_in_controlled("deliver"),)),
    ]
    for family, dead in (("setup1", True), ("setup2", False)):
        for where, fwd, bwd, text in (("backward", A.NONE, A.FULL, "the backward channel"),
                                      ("both", A.FULL, A.FULL, "both channels")):
            out.append(ScenarioSpec(
                f"abp/{family}-{where}",
                f"ABP {family} plant with {text} attacked",
                _abp_safety(dead, fwd, bwd), None, qualitative=True))
    TEO = Classification.THERE_EXISTS_ONLY
    out += [
        ScenarioSpec(
            "tcp/setup1", "TCP with channels, fully attacked network, TM1, no peer timeout",
            _tcp_tm1(True, False, NA.FULL),
            E(plant_states=118761, plant_marked=6307, spec_states=34658, spec_marked=704,
              supcn_empty=True, classification=TEO, plant_trim=False)),
        ScenarioSpec(
            "tcp/setup2", "TCP Setup 1 rerun with every state marked (there-exists check)",
            _tcp_tm1(True, False, NA.FULL),
            E(plant_states=118761, plant_marked=6307, spec_states=34658, spec_marked=704,
              supcn_empty=False, witness=TCP_W_TM1, classification=TEO),
            relaxed=True),
        ScenarioSpec(
            "tcp/setup3", "TCP with channels, peers with listen timeout, TM1",
            _tcp_tm1(True, True, NA.FULL),
            E(plant_states=118761, plant_marked=6307, spec_states=38270, spec_marked=704,
              supcn_states=52783, supcn_marked=626, supcn_empty=False, disablement_needed=True,
              witness=TCP_W_TM1, classification=FA)),
        ScenarioSpec(
            "tcp/setup4", "TCP without channels, fully attacked network, TM1",
            _tcp_tm1(False, True, NA.FULL),
            E(nominal_states=41, nominal_marked=5, nominal_trim=True, plant_states=580,
              plant_marked=27, plant_trim=False, spec_states=547, spec_marked=3,
              supcn_states=513, supcn_marked=3, supcn_empty=False, witness=TCP_W_CF,
              classification=FA)),
        ScenarioSpec(
            "tcp/setup5", "TCP without channels, weak attacker forging one SYN_ACK, TM1",
            _tcp_tm1(False, True, NA.WEAK, controllable=frozenset({"SYN_AN", "SYN_ACK_NB"})),
            E(plant_states=48, plant_marked=7, plant_deadlocks=1, spec_states=47, spec_marked=1,
              supcn_states=63, supcn_marked=2, supcn_empty=False, witness=TCP_W_WEAK,
              classification=FA),
            extra_checks=(_check_empty_when("SYN_AN is uncontrollable",
                                            controllable=frozenset({"SYN_ACK_NB"})),)),
        ScenarioSpec(
            "tcp/setup6", "TCP without channels, TM2 (peer A eventually established)",
            _tcp_deadlock_spec(*TM2_MARKING),
            E(plant_states=580, plant_deadlocks=25, spec_states=580, spec_marked=25,
              supcn_empty=False, disablement_needed=False, witness=TCP_W_TM2, classification=FA)),
        ScenarioSpec(
            "tcp/setup7", "TCP without channels, TM3 (no deadlock away from closed)",
            _tcp_deadlock_spec(*TM3_MARKING),
            E(nominal_states=41, nominal_marked=1, nominal_trim=True, plant_states=580,
              plant_deadlocks=25, plant_livelocks=0, spec_states=580, spec_marked=25,
              supcn_states=660, supcn_marked=25, supcn_empty=False, disablement_needed=False,
              witness=TCP_W_TM3, classification=FA)),
    ]
    return out


_REGISTRY = {s.id: s for s in _scenarios()}


def list_scenarios():
    return [_REGISTRY[k] for k in sorted(_REGISTRY)]


def get_scenario(scenario_id):
    try:
        return _REGISTRY[scenario_id]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {scenario_id!r}") from None


# -- execution -------------------------------------------------------------------

@lru_cache(maxsize=None)
def build_instance(scenario_id):
    return get_scenario(scenario_id).build()


@lru_cache(maxsize=None)
def synthesize(scenario_id, observable=None, controllable=None):
    """``(instance, SynthesisResult)``, optionally with a modified partition."""
    scn = get_scenario(scenario_id)
    inst = build_instance(scenario_id)
    p = inst.partition
    if observable is not None or controllable is not None:
        obs = p.observable if observable is None else frozenset(observable)
        ctrl = p.controllable if controllable is None else frozenset(controllable)
        p = EventPartition(ctrl & obs, obs)
    result = supcn(inst.spec, inst.plant, p)
    result.classification = classify(result, inst.spec, inst.plant, p, inst.spec_all_marked)
    if scn.relaxed:
        behaviour = relaxed_marked_behavior(inst.spec, inst.plant, p, inst.spec_all_marked)
        result = replace(result, supcn=behaviour,
                         disablement_needed=_disables(behaviour, inst.plant))
    return inst, result, p


def _disables(a, g):
    if a.is_empty():
        return False
    return not generated_language_equal(a, g)


def _word(s):
    return ".".join(s) if s is not None else None


def _check(checks, name, expected, actual, level="hard"):
    checks.append({"name": name, "level": level, "expected": expected, "actual": actual,
                   "passed": expected == actual})


def _count_checks(checks, exp, what, states, marked):
    es = getattr(exp, f"{what}_states")
    em = getattr(exp, f"{what}_marked")
    if es is not None:
        _check(checks, f"{what} states", es, states, "warning")
    if em is not None:
        _check(checks, f"{what} marked", em, marked, "warning")


def _outcome_report(scn, inst, result, p):
    g, h, s = inst.plant, inst.spec, result.supcn
    exp = scn.expected or ExpectedReport()
    checks = []
    nominal_ok = True
    try:
        validate_nominal(inst.prop, inst.nominal, inst.nominal_other)
    except (ModelIncorrect, PlantIsTrim) as exc:
        nominal_ok = False
        _check(checks, "nominal model satisfies the property", True, str(exc))
    else:
        _check(checks, "nominal model satisfies the property", True, True)

    if exp.nominal_states is not None:
        _check(checks, "nominal states", exp.nominal_states, inst.nominal.num_states, "warning")
    if exp.nominal_marked is not None:
        _check(checks, "nominal marked", exp.nominal_marked, inst.nominal.num_marked, "warning")
    if exp.nominal_trim is not None:
        _check(checks, "nominal trim", exp.nominal_trim, is_trim(inst.nominal))
    _count_checks(checks, exp, "plant", g.num_states, g.num_marked)
    if exp.plant_trim is not None:
        _check(checks, "plant trim", exp.plant_trim, is_trim(g))
    deadlocks = len(deadlock_states(g))
    livelocks = len(livelock_states(g))
    if exp.plant_deadlocks is not None:
        _check(checks, "plant deadlocks", exp.plant_deadlocks, deadlocks)
    if exp.plant_livelocks is not None:
        _check(checks, "plant livelocks", exp.plant_livelocks, livelocks)
    _count_checks(checks, exp, "spec", h.num_states, h.num_marked)
    _count_checks(checks, exp, "supcn", s.num_states, s.num_marked)
    if exp.supcn_empty is not None:
        _check(checks, "supCN empty", exp.supcn_empty, s.is_empty())
    if exp.disablement_needed is not None:
        _check(checks, "disablement needed", exp.disablement_needed, result.disablement_needed)
    if exp.classification is not None:
        _check(checks, "classification", exp.classification.value, result.classification.value)
    if exp.witness is not None:
        member = (not s.is_empty()) and contains(s, exp.witness)[1]
        _check(checks, f"{_word(exp.witness)} in L_m(supCN)", True, member)
        if inst.monitor is not None:
            proj = tuple(e for e in exp.witness if e in inst.monitor.events)
            _check(checks, "witness drives the monitor to a marked state", True,
                   contains(inst.monitor, proj)[1])
        else:
            _check(checks, "witness reaches a marked spec state", True, contains(h, exp.witness)[1])

    if not s.is_empty() and not scn.relaxed:
        ok_c, _ = check_controllability(s, g, p.uncontrollable(g.events), limit=1)
        _check(checks, "supCN controllable", True, ok_c)
        _check(checks, "supCN normal", True, check_normality(s, g, p.observable))
    witness = shortest_marked_string(s) if not s.is_empty() else None
    return {
        "nominal_ok": nominal_ok,
        "plant": {"states": g.num_states, "marked": g.num_marked, "trim": is_trim(g),
                  "deadlocks": deadlocks, "livelocks": livelocks},
        "spec": {"states": h.num_states, "marked": h.num_marked},
        "supcn": {"states": s.num_states, "marked": s.num_marked, "empty": s.is_empty()},
        "disablement_needed": result.disablement_needed,
        "classification": result.classification.value,
        "witness": _word(witness),
        "checks": checks,
    }


def _finish(report):
    checks = report["checks"]
    report["hard_failures"] = sum(1 for c in checks if c["level"] == "hard" and not c["passed"])
    report["warnings"] = sum(1 for c in checks if c["level"] == "warning" and not c["passed"])
    report["passed"] = report["hard_failures"] == 0
    return report


def _header(scn, p):
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "id": scn.id,
        "description": scn.description,
        "qualitative": scn.qualitative,
        "partition": {"controllable": sorted(p.controllable), "observable": sorted(p.observable)},
    }


def run(scenario_id):
    """Full pipeline for one scenario; returns a JSON-ready report dict."""
    scn = get_scenario(scenario_id)
    inst, result, p = synthesize(scenario_id)
    report = _header(scn, p)
    body = _outcome_report(scn, inst, result, p)
    out = {"supcn": result.supcn, "result": result, "instance": inst}
    for extra in scn.extra_checks:
        for name, expected, actual in extra(scn, out):
            _check(body["checks"], name, expected, actual)
    report.update(body)
    return _finish(report)


def run_variant(scenario_id, observable=None, controllable=None):
    """Rerun a scenario with a modified partition (no extra cross-checks)."""
    scn = get_scenario(scenario_id)
    obs = None if observable is None else frozenset(observable)
    ctrl = None if controllable is None else frozenset(controllable)
    inst, result, p = synthesize(scenario_id, obs, ctrl)
    report = _header(scn, p)
    body = _outcome_report(replace(scn, expected=None), inst, result, p)
    report.update(body)
    return _finish(report)


def sweep_observability(scenario_id, drop):
    """Rerun with ``drop`` removed from the observable (and controllable) events."""
    inst = build_instance(scenario_id)
    drop = frozenset(drop)
    unknown = drop - inst.partition.observable
    if unknown:
        raise ValueError(f"events {sorted(unknown)} are not observable in {scenario_id}")
    if not drop:
        return run(scenario_id)
    return run_variant(scenario_id, observable=inst.partition.observable - drop)


def compare_attack_strategies(id_a, id_b):
    """Relation of ``L_m(supCN_a)`` to ``L_m(supCN_b)``."""
    a = synthesize(id_a)[1].supcn
    b = synthesize(id_b)[1].supcn
    if a.events != b.events:
        raise AlphabetMismatch(f"{id_a} and {id_b} have different alphabets")
    if a.is_empty() or b.is_empty():
        raise EmptyOperand("cannot compare with an empty supervisor")
    a_in_b = marked_language_included(a, b)
    b_in_a = marked_language_included(b, a)
    if a_in_b and b_in_a:
        return Comparison.EQUAL
    if b_in_a:
        return Comparison.STRICTLY_CONTAINS
    if a_in_b:
        return Comparison.STRICTLY_CONTAINED
    return Comparison.INCOMPARABLE


def run_all(ids=None):
    ids = sorted(_REGISTRY) if ids is None else sorted(ids)
    return [run(i) for i in ids]
