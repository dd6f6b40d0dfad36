import json
from pathlib import Path

import pytest

from attacksynth import scenarios
from attacksynth.errors import AlphabetMismatch, UnknownScenario
from attacksynth.scenarios import Comparison

GOLDEN = Path(__file__).parent / "golden"
FAST = [s.id for s in scenarios.list_scenarios()
        if s.id.startswith("abp/") or s.id in ("tcp/setup4", "tcp/setup5", "tcp/setup6",
                                               "tcp/setup7")]

REPORT_KEYS = {"format_version", "id", "description", "qualitative", "partition", "nominal_ok",
               "plant", "spec", "supcn", "disablement_needed", "classification", "witness",
               "checks", "hard_failures", "warnings", "passed"}


def test_registry():
    ids = [s.id for s in scenarios.list_scenarios()]
    assert ids == sorted(ids)
    assert len(ids) == 17
    assert sum(s.qualitative for s in scenarios.list_scenarios()) == 4
    with pytest.raises(UnknownScenario):
        scenarios.get_scenario("abp/setup99")


@pytest.mark.parametrize("scenario_id", FAST)
def test_fast_scenarios_pass(scenario_id):
    report = scenarios.run(scenario_id)
    assert set(report) == REPORT_KEYS
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
    for chk in report["checks"]:
        assert set(chk) == {"name", "level", "expected", "actual", "passed"}
        assert chk["level"] in ("hard", "warning")
    json.dumps(report)


def test_report_is_deterministic():
    a = json.dumps(scenarios.run("abp/setup5"), sort_keys=True)
    scenarios.synthesize.cache_clear()
    scenarios.build_instance.cache_clear()
    b = json.dumps(scenarios.run("abp/setup5"), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("scenario_id", ["abp/setup2", "tcp/setup5"])
def test_golden_reports(scenario_id):
    path = GOLDEN / (scenario_id.replace("/", "_") + ".json")
    expected = json.loads(path.read_text())
    assert scenarios.run(scenario_id) == expected


def test_qualitative_reports_have_no_expectations():
    report = scenarios.run("abp/setup2-both")
    assert report["qualitative"]
    assert all(c["name"] in ("nominal model satisfies the property", "supCN controllable",
                             "supCN normal") for c in report["checks"])


def test_compare_attack_strategies():
    assert scenarios.compare_attack_strategies("abp/setup2", "abp/setup3") \
        is Comparison.STRICTLY_CONTAINS
    assert scenarios.compare_attack_strategies("abp/setup3", "abp/setup2") \
        is Comparison.STRICTLY_CONTAINED
    assert scenarios.compare_attack_strategies("abp/setup2", "abp/setup4") is Comparison.EQUAL
    with pytest.raises(AlphabetMismatch):
        scenarios.compare_attack_strategies("abp/setup2", "tcp/setup5")


def test_sweep_observability():
    same = scenarios.sweep_observability("abp/setup2", [])
    assert same == scenarios.run("abp/setup2")
    dropped = scenarios.sweep_observability("abp/setup2", ["a0", "a1"])
    assert "a0" not in dropped["partition"]["observable"]
    with pytest.raises(ValueError):
        scenarios.sweep_observability("abp/setup2", ["deliver"])


def test_run_variant_forces_controllable_inside_observable():
    rep = scenarios.run_variant("abp/setup2", observable=["p0", "p1"])
    assert rep["partition"]["controllable"] == []
    # every run of this plant can still reach a violation, so no control is needed
    assert not rep["supcn"]["empty"]
    assert rep["disablement_needed"] is False
