import json

import pytest

from contract_market.choice import GreedyMatroid
from contract_market.errors import InputError
from contract_market.files import dump_market, load_market, load_scenario_file, market_from_dict, market_to_dict, save_market


def test_m1_file_matches_fixture(m1, m1_path):
    assert load_market(m1_path) == m1


def test_save_is_canonical(m1, m1_path, tmp_path):
    out = tmp_path / "nested" / "m1.json"
    save_market(m1, out)
    assert out.read_bytes() == m1_path.read_bytes()
    assert load_market(out) == m1
    assert dump_market(m1).endswith("}\n")


def test_greedy_choice_round_trips(m1):
    data = market_to_dict(m1)
    assert data["choices"]["w2"] == {"kind": "greedy", "quota": 1, "priority": ["d", "c"], "acceptable": ["c", "d"]}
    rebuilt = market_from_dict(data)
    assert isinstance(rebuilt.choices["w2"], GreedyMatroid)


def test_json_syntax_error_has_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "workers": [\n', encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_market(path)
    assert info.value.location.startswith(f"{path}:3:")


def test_duplicate_choice_keys_are_rejected(m1_path, tmp_path):
    text = m1_path.read_text(encoding="utf-8")
    duplicated = text.replace('"choices": {', '"choices": {\n    "f1": {"kind": "table", "ranking": [[]]},', 1)
    path = tmp_path / "dup.json"
    path.write_text(duplicated, encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_market(path)
    assert info.value.location == f"{path}:choices.f1"
    assert "f1" in str(info.value)


def test_duplicate_keys_inside_lists_are_located(tmp_path):
    path = tmp_path / "dup.json"
    path.write_text('{"workers": [], "firms": [], "contracts": [{"id": "a", "id": "b"}], "choices": {}}', encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_market(path)
    assert info.value.location == f"{path}:contracts.0.id"


def test_schema_error_has_field_path(m1):
    data = market_to_dict(m1)
    data["choices"]["f1"]["quota"] = "many"
    with pytest.raises(InputError) as info:
        market_from_dict(data, source="m1.json")
    assert info.value.location == "m1.json:choices.f1.greedy.quota"


def test_semantic_errors_are_located(m1):
    data = market_to_dict(m1)
    data["contracts"].append(dict(data["contracts"][0]))
    with pytest.raises(InputError) as info:
        market_from_dict(data, source="m1.json")
    assert info.value.location == "m1.json:contracts.4.id"

    data = market_to_dict(m1)
    data["contracts"][1]["firm"] = "f9"
    with pytest.raises(InputError) as info:
        market_from_dict(data, source="m1.json")
    assert info.value.location == "m1.json:contracts.b.firm"


def test_unknown_keys_are_rejected(m1):
    data = market_to_dict(m1)
    data["extra"] = 1
    with pytest.raises(InputError):
        market_from_dict(data)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_market(tmp_path / "absent.json")


def test_scenario_file_defaults(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"market": "m1.json", "event": {"kind": "add-firms", "firms": ["f2"]}}), encoding="utf-8")
    parsed = load_scenario_file(path)
    assert parsed.start == "worker-pessimal"
    assert parsed.strategy == "full"
    assert parsed.interrupt_at is None


def test_scenario_file_rejects_bad_kind(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"market": "m1.json", "event": {"kind": "merge"}}), encoding="utf-8")
    with pytest.raises(InputError) as info:
        load_scenario_file(path)
    assert "event.kind" in info.value.location
