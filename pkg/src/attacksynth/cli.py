"""Command-line interface: ``attacksynth <verb> ...``.

Exit status is 0 when every hard check passes, 1 when some hard check
fails and 2 on usage or input errors.
"""

import argparse
import json
import sys
import time

from . import document, scenarios
from .automaton import contains, marked_language_included, mark_all, mark_product, parse_string
from .errors import AlphabetMismatch, AttackSynthError, UnknownModel
from .protocols import abp, tcp
from .specs import abp_liveness_monitor, abp_safety_monitor, tcp_tm1_monitor
from .supervisory import EventPartition, classify, realize, supcn

ABP_PARTITION = EventPartition(abp.CONTROLLABLE, abp.OBSERVABLE)
TCP_PARTITION = EventPartition(tcp.ATTK, tcp.E_N_A)
TCP_CF_PARTITION = EventPartition(tcp.controllable_events(True), tcp.observable_events(True))

A = abp.Attack
NA = tcp.NetworkAttack

BUILTIN_MODELS = {
    "abp/sender": (lambda: abp.sender(True), ABP_PARTITION),
    "abp/sender_nodead": (lambda: abp.sender(False), ABP_PARTITION),
    "abp/receiver": (abp.receiver, ABP_PARTITION),
    "abp/forward_channel_nd": (abp.forward_channel_nd, ABP_PARTITION),
    "abp/backward_channel_nd": (abp.backward_channel_nd, ABP_PARTITION),
    "abp/forward_channel": (abp.forward_channel, ABP_PARTITION),
    "abp/backward_channel": (abp.backward_channel, ABP_PARTITION),
    "abp/forward_channel_full_nd": (lambda: abp.attacked_channel_nd("forward", A.FULL), ABP_PARTITION),
    "abp/forward_channel_weak_nd": (lambda: abp.attacked_channel_nd("forward", A.WEAK), ABP_PARTITION),
    "abp/forward_channel_oneshot_nd": (lambda: abp.attacked_channel_nd("forward", A.ONESHOT),
                                       ABP_PARTITION),
    "abp/backward_channel_full_nd": (lambda: abp.attacked_channel_nd("backward", A.FULL),
                                     ABP_PARTITION),
    "abp/sending_client": (lambda: abp.sending_client(True), ABP_PARTITION),
    "abp/sending_client_nodead": (lambda: abp.sending_client(False), ABP_PARTITION),
    "abp/receiving_client": (abp.receiving_client, ABP_PARTITION),
    "abp/timer": (abp.timer, ABP_PARTITION),
    "abp/safety_monitor1": (lambda: abp_safety_monitor(1), ABP_PARTITION),
    "abp/safety_monitor2": (lambda: abp_safety_monitor(2), ABP_PARTITION),
    "abp/liveness_monitor": (abp_liveness_monitor, ABP_PARTITION),
    "tcp/peer_a": (lambda: tcp.peer("A"), TCP_PARTITION),
    "tcp/peer_b": (lambda: tcp.peer("B"), TCP_PARTITION),
    "tcp/peer_a_timeout": (lambda: tcp.peer("A", True), TCP_PARTITION),
    "tcp/peer_b_timeout": (lambda: tcp.peer("B", True), TCP_PARTITION),
    "tcp/channel1": (lambda: tcp.channel(1), TCP_PARTITION),
    "tcp/channel2": (lambda: tcp.channel(2), TCP_PARTITION),
    "tcp/channel3": (lambda: tcp.channel(3), TCP_PARTITION),
    "tcp/channel4": (lambda: tcp.channel(4), TCP_PARTITION),
    "tcp/network": (lambda: tcp.network(False), TCP_PARTITION),
    "tcp/network_full": (lambda: tcp.attacked_network(NA.FULL, False), TCP_PARTITION),
    "tcp/network_cf": (lambda: tcp.network(True), TCP_CF_PARTITION),
    "tcp/network_full_cf": (lambda: tcp.attacked_network(NA.FULL, True), TCP_CF_PARTITION),
    "tcp/network_weak_cf": (lambda: tcp.attacked_network(NA.WEAK, True), TCP_CF_PARTITION),
    "tcp/tm1_monitor": (lambda: tcp_tm1_monitor(False), TCP_PARTITION),
}

SCENARIO_PARTS = ("plant", "spec", "supcn", "nominal")


def builtin_model_names():
    names = sorted(BUILTIN_MODELS)
    for scn in scenarios.list_scenarios():
        names.extend(f"{scn.id}:{part}" for part in SCENARIO_PARTS)
    return names


def resolve_model(name):
    """Built-in model, ``<scenario>:<part>``, or a document file path."""
    if name in BUILTIN_MODELS:
        factory, partition = BUILTIN_MODELS[name]
        return factory(), partition
    if ":" in name:
        scenario_id, _, part = name.rpartition(":")
        if part in SCENARIO_PARTS:
            try:
                scenarios.get_scenario(scenario_id)
            except AttackSynthError:
                raise UnknownModel(f"unknown model {name!r}") from None
            inst, result, p = scenarios.synthesize(scenario_id)
            model = {"plant": inst.plant, "spec": inst.spec, "supcn": result.supcn,
                     "nominal": inst.nominal}[part]
            return model, p
    try:
        return document.load(name)
    except FileNotFoundError:
        raise UnknownModel(f"unknown model {name!r} (not built in, not a file)") from None


def _print_human(report, elapsed=None):
    status = "PASS" if report["passed"] else "FAIL"
    tag = " [qualitative]" if report["qualitative"] else ""
    print(f"{report['id']}{tag}: {status}  {report['description']}")
    p, s, c = report["plant"], report["spec"], report["supcn"]
    print(f"  plant {p['states']}/{p['marked']} (trim={p['trim']}, deadlocks={p['deadlocks']}, "
          f"livelocks={p['livelocks']})  spec {s['states']}/{s['marked']}  "
          f"supCN {c['states']}/{c['marked']}")
    print(f"  classification={report['classification']}  "
          f"disablement_needed={report['disablement_needed']}  witness={report['witness']}")
    for chk in report["checks"]:
        mark = "ok  " if chk["passed"] else ("WARN" if chk["level"] == "warning" else "FAIL")
        extra = "" if chk["passed"] else f" (expected {chk['expected']}, got {chk['actual']})"
        print(f"    {mark} {chk['name']}{extra}")
    if elapsed is not None:
        print(f"  elapsed {elapsed:.1f}s")


def _emit(reports, fmt, timings=None):
    if fmt == "json":
        out = reports[0] if len(reports) == 1 else reports
        print(json.dumps(out, indent=1, sort_keys=True))
    else:
        for i, rep in enumerate(reports):
            _print_human(rep, timings[i] if timings else None)


def cmd_list(args):
    for scn in scenarios.list_scenarios():
        tag = " (qualitative)" if scn.qualitative else ""
        print(f"{scn.id:24s} {scn.description}{tag}")
    return 0


def cmd_run(args):
    start = time.perf_counter()
    report = scenarios.run(args.id)
    _emit([report], args.format, [time.perf_counter() - start])
    return 0 if report["passed"] else 1


def cmd_run_all(args):
    reports, timings = [], []
    for scn in scenarios.list_scenarios():
        start = time.perf_counter()
        reports.append(scenarios.run(scn.id))
        timings.append(time.perf_counter() - start)
    _emit(reports, args.format, timings)
    failed = [r["id"] for r in reports if not r["passed"]]
    if args.format == "human":
        print(f"{len(reports) - len(failed)}/{len(reports)} scenarios passed"
              + (f"; failing: {', '.join(failed)}" if failed else ""))
    return 0 if not failed else 1


def cmd_synth(args):
    plant, partition = document.load(args.plant)
    spec, _ = document.load(args.spec)
    extra = spec.events - plant.events
    if extra:
        raise AlphabetMismatch(f"spec uses events not in the plant: {sorted(extra)}")
    if spec.events == plant.events and not marked_language_included(spec, mark_all(plant)):
        print("warning: SpecNotSublanguage: L_m(spec) is not inside L(plant); "
              "intersecting with the plant", file=sys.stderr)
    h = mark_product(plant, spec, name="H_a")
    result = supcn(h, plant, partition)
    result.classification = classify(result, h, plant, partition)
    print(f"supCN: {result.state_count} states, {result.marked_count} marked, "
          f"empty={result.is_empty}")
    print(f"disablement_needed={result.disablement_needed}  "
          f"classification={result.classification.value}")
    if args.out_supcn:
        document.save(result.supcn, args.out_supcn, partition)
    if result.is_empty:
        print("no supervisor written (supCN is empty)")
        return 0
    realization = realize(result.supcn, plant, partition)
    document.save(realization.automaton, args.out_supervisor, partition)
    return 0


def cmd_export(args):
    model, partition = resolve_model(args.model)
    text = document.to_dot(model) if args.format == "dot" else document.dumps(model, partition)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def cmd_check(args):
    model, _ = resolve_model(args.model)
    word = parse_string(args.string)
    if model.is_empty():
        gen, marked = False, False
    else:
        gen, marked = contains(model, word)
    print(f"in_generated={str(gen).lower()} in_marked={str(marked).lower()}")
    return 0


def cmd_sweep(args):
    drop = [e for e in args.drop_observable.split(",") if e] if args.drop_observable else []
    start = time.perf_counter()
    report = scenarios.sweep_observability(args.id, drop)
    _emit([report], args.format, [time.perf_counter() - start])
    return 0 if report["passed"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="attacksynth",
        description="Synthesize person-in-the-middle attacks on protocol models.")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("list", help="list built-in scenarios").set_defaults(func=cmd_list)

    fmt = dict(choices=["human", "json"], default="human")
    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("id")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("run-all", help="run every scenario")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_run_all)

    p = sub.add_parser("synth", help="synthesize an attacker from document files")
    p.add_argument("--plant", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out-supervisor", required=True)
    p.add_argument("--out-supcn")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export", help="export a model as a document or Graphviz dot")
    p.add_argument("model")
    p.add_argument("--format", choices=["doc", "dot"], default="doc")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("check", help="test a string against a model")
    p.add_argument("model")
    p.add_argument("--string", required=True, help="dot-separated events, empty for epsilon")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="rerun a scenario with fewer observable events")
    p.add_argument("id")
    p.add_argument("--drop-observable", default="")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AttackSynthError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
