import json

import pytest
from click.testing import CliRunner

from conftest import ROOT

from contract_market.cli import cli, run
from contract_market.files import load_market, market_to_dict
from contract_market.model import dualize


@pytest.fixture
def invoke(config_file, m1_path):
    runner = CliRunner()

    def call(*args):
        argv = ["--config", str(config_file)] + [str(m1_path) if arg == "M1" else arg for arg in args]
        return runner.invoke(cli, argv)

    return call


def test_check_stable(invoke):
    result = invoke("check", "-m", "M1", "-a", "a,d")
    assert result.exit_code == 0
    assert "stable                true" in result.output
    assert "blocking_contracts    {}" in result.output


def test_check_json(invoke):
    result = invoke("--json", "check", "-m", "M1", "-a", "c", "--worker-side")
    data = json.loads(result.output)
    assert data["quasi_stable"] is True
    assert data["stable"] is False
    assert data["blocking_contracts"] == ["b", "d"]
    assert data["worker_quasi_stable"] is False


def test_check_in_a_view(invoke):
    result = invoke("--json", "check", "-m", "M1", "-a", "c", "--firms", "f1")
    assert json.loads(result.output)["stable"] is True


def test_unknown_contract_is_an_input_error(invoke):
    result = invoke("check", "-m", "M1", "-a", "zz")
    assert result.exit_code == 2


def test_malformed_market_file(invoke, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{", encoding="utf-8")
    result = invoke("check", "-m", str(path))
    assert result.exit_code == 2


def test_da_single(invoke):
    result = invoke("da", "-m", "M1", "--strategy", "single")
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "t=0 Y={}",
        "t=1 X={b} Z={b} Y={b}",
        "t=2 X={b,c} Z={c} Y={b,c}",
        "outcome {b,c} after 2 steps",
    ]


def test_da_random_is_deterministic(invoke):
    first = invoke("--json", "da", "-m", "M1", "--strategy", "random", "--seed", "17")
    second = invoke("--json", "da", "-m", "M1", "--strategy", "random", "--seed", "17")
    assert first.output == second.output
    assert json.loads(first.output)["outcome"] == ["b", "c"]


def test_da_json_carries_the_text_trace(invoke):
    text = invoke("da", "-m", "M1", "--strategy", "single").output.splitlines()
    data = json.loads(invoke("--json", "da", "-m", "M1", "--strategy", "single").output)
    assert data["lines"] == text
    assert data["outcome"] == ["b", "c"]
    assert len(data["steps"]) == 2


def test_da_worker_optimal(invoke):
    result = invoke("--json", "da", "-m", "M1", "--worker-optimal")
    assert json.loads(result.output) == {"worker_optimal": ["a", "d"], "worker_pessimal": ["b", "c"]}


def test_da_from_non_quasi_stable_start(invoke):
    assert invoke("da", "-m", "M1", "-a", "a").exit_code == 2


def test_lattice(invoke):
    assert "= {a,d}" in invoke("lattice", "-m", "M1", "--join", "a,d", "b,c").output
    assert "= {}" in invoke("lattice", "-m", "M1", "--meet", "c", "b").output
    result = invoke("--json", "lattice", "-m", "M1", "--compare", "b,c", "a,d", "--side", "f")
    assert json.loads(result.output) == {"dominates": True, "side": "f"}


def test_lattice_needs_one_operation(invoke):
    assert invoke("lattice", "-m", "M1").exit_code == 2


def test_tarski(invoke):
    result = invoke("--json", "tarski", "-m", "M1")
    assert json.loads(result.output) == {"iterates": [[], ["b", "c"]], "fixed_point": ["b", "c"]}


def test_enumerate_and_certify(invoke):
    data = json.loads(invoke("--json", "enumerate", "-m", "M1").output)
    assert data["stable"] == [["a", "d"], ["b", "c"]]
    assert invoke("enumerate", "-m", "M1", "--cap", "2").exit_code == 2

    result = invoke("certify", "-m", "M1")
    assert result.exit_code == 0
    assert result.output.splitlines()[-1] == "certified"


def test_verify_prefs(invoke, tmp_path, complementary_market):
    assert invoke("verify-prefs", "-m", "M1").exit_code == 0
    path = tmp_path / "comp.json"
    path.write_text(json.dumps(market_to_dict(complementary_market)), encoding="utf-8")
    result = invoke("verify-prefs", "-m", str(path), "--property", "substitutability")
    assert result.exit_code == 1
    assert "Y={x,y} Z={x}" in result.output


def test_scenario(invoke):
    result = invoke("--json", "scenario", "-s", str(ROOT / "scenarios" / "m1_entry.json"))
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["outcome"] == ["b", "c"]
    assert data["new_entrant_slices"] == {"f2": {"outcome": ["b"], "worker_pessimal": ["b"]}}


def test_gen_is_byte_identical(invoke, tmp_path):
    args = ("gen", "--n-workers", "3", "--n-firms", "2", "--density", "0.7", "--seed", "9")
    first, second = invoke(*args), invoke(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    out = tmp_path / "g.json"
    invoke(*args, "-o", str(out))
    assert out.read_text(encoding="utf-8") == first.output


def test_gen_rejects_bad_params(invoke):
    assert invoke("gen", "--quota-min", "3", "--quota-max", "1").exit_code == 2


def test_dual(invoke, tmp_path, m1):
    out = tmp_path / "dual.json"
    assert invoke("dual", "-m", "M1", "-o", str(out)).exit_code == 0
    assert load_market(out) == dualize(m1)


def test_run_returns_exit_codes(config_file, m1_path):
    assert run(["--config", str(config_file), "check", "-m", str(m1_path), "-a", "a,d"]) == 0
    assert run(["--config", str(config_file), "check", "-m", str(m1_path), "-a", "zz"]) == 2
