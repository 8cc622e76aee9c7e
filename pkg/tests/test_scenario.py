import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskgame.errors import ScenarioError
from riskgame.scenario import (
    load_actual_detections,
    load_detection_matrix,
    load_scenario,
    parse_scenario,
    scenario_to_dict,
    write_scenario,
)

from conftest import FIXTURES


@pytest.fixture
def doc(paper_path):
    return json.loads(paper_path.read_text())


def test_paper_fixture(paper, table1):
    assert paper.detection_matrix == table1
    assert [a.alpha for a in paper.attackers] == [-0.04, 0.04]
    assert paper.actual_detections == {
        "Aggressive ransomware": 0.99958,
        "Stealthy ransomware": 0.99956,
        "Aggressive keylogger": 1.0,
        "Stealthy keylogger": 0.9972,
    }
    assert [round(v.value, 12) for v in paper.variants] == [7.5, round(1 / 3, 12), 2.0, 0.05]
    assert paper.trials == 100_000 and paper.seed == 42
    assert paper.p_rounding_decimals == 4
    assert paper.belief_mode == "row_average"


def test_table_fixtures_agree_with_paper_fixture(paper):
    assert load_detection_matrix(FIXTURES / "table1.json") == paper.detection_matrix
    assert load_actual_detections(FIXTURES / "table2.json") == paper.actual_detections


def test_defaults_applied(doc):
    for key in ("simulation", "options", "families", "strategies", "value_order", "actual_detections"):
        doc.pop(key)
    s = parse_scenario(doc)
    assert (s.trials, s.seed, s.belief_mode, s.p_rounding_decimals) == (100_000, 42, "row_average", 4)
    assert s.families["Ransomware"].default_exfil_interval == 15
    assert s.actual_detections is None


def test_rounding_none(doc):
    doc["options"]["p_rounding_decimals"] = None
    assert parse_scenario(doc).p_rounding_decimals is None
    doc["options"]["p_rounding_decimals"] = "none"
    assert parse_scenario(doc).p_rounding_decimals is None


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["detection_matrix"]["Keylogger"].__setitem__("Merged", "120"), "detection_matrix.Keylogger.Merged"),
        (lambda d: d["detection_matrix"]["Keylogger"].pop("Merged"), "detection_matrix.Keylogger.Merged"),
        (lambda d: d["detection_matrix"].pop("Ransomware"), "detection_matrix.Ransomware"),
        (lambda d: d["actual_detections"].__setitem__("Stealthy keylogger", "-1"), "actual_detections.Stealthy keylogger"),
        (lambda d: d["actual_detections"].__setitem__("Ghost", "50"), "actual_detections.Ghost"),
        (lambda d: d["variants"][1].__setitem__("exfil_interval", "0"), "variants[1].exfil_interval"),
        (lambda d: d["variants"][1].__setitem__("family", "Worm"), "variants[1].family"),
        (lambda d: d["variants"][1].__setitem__("label", "Aggressive ransomware"), "variants[1].label"),
        (lambda d: d["attackers"][0].__setitem__("alpha", "x"), "attackers[0].alpha"),
        (lambda d: d["simulation"].__setitem__("trials", 0), "simulation.trials"),
        (lambda d: d["simulation"].__setitem__("seed", -3), "simulation.seed"),
        (lambda d: d["options"].__setitem__("belief_mode", "psychic"), "options.belief_mode"),
        (lambda d: d.__setitem__("schema_version", 2), "schema_version"),
        (lambda d: d.__setitem__("value_order", ["Ransomware"]), "value_order"),
        (lambda d: d["families"]["Keylogger"].__setitem__("default_exfil_interval", "-1"),
         "families.Keylogger.default_exfil_interval"),
    ],
)
def test_validation_names_the_field(doc, mutate, path):
    mutate(doc)
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    assert err.value.path == path
    assert path in str(err.value)


def test_percent_string_semantics(doc):
    doc["detection_matrix"]["Keylogger"]["Merged"] = 96.35  # bare numbers also accepted
    assert parse_scenario(doc).detection_matrix["Keylogger", "Merged"] == 0.9635


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(p)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_scenario(tmp_path / "nope.json")


def test_round_trip(paper, tmp_path):
    out = tmp_path / "s.json"
    write_scenario(paper, out)
    assert load_scenario(out) == paper


percent = st.decimals(0, 100, places=3, allow_nan=False).map(lambda d: format(d, "f"))


@settings(max_examples=50)
@given(
    st.lists(st.lists(percent, min_size=3, max_size=3), min_size=3, max_size=3),
    st.lists(st.floats(1e-3, 1e3), min_size=4, max_size=4),
    st.lists(st.floats(-1, 1), min_size=1, max_size=4),
    st.integers(1, 10**7), st.integers(0, 2**64 - 1),
)
def test_round_trip_property(rows, intervals, alphas, trials, seed):
    base = json.loads((FIXTURES / "paper.json").read_text())
    doc = copy.deepcopy(base)
    for fam, row in zip(doc["detection_matrix"], rows):
        doc["detection_matrix"][fam] = dict(zip(("Syscall", "Packets", "Merged"), row))
    for v, i in zip(doc["variants"], intervals):
        v["exfil_interval"] = i
    doc["attackers"] = [{"label": f"a{i}", "alpha": a} for i, a in enumerate(alphas)]
    doc["simulation"] = {"trials": trials, "seed": seed}
    s = parse_scenario(doc)
    assert parse_scenario(json.loads(json.dumps(scenario_to_dict(s)))) == s
