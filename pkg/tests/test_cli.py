import orjson
import pytest
from typer.testing import CliRunner

from app.cli import app, main, parse_args
from app.known_states import BELL, MAX_MAGIC_SEED, PLUS_PLUS
from app.states import random_state
from app.structure import computational_state

runner = CliRunner(mix_stderr=False)


def invoke(*args):
    return runner.invoke(app, ["--json", "--log-level", "WARNING", *map(str, args)])


def test_parse_args_resolves_subcommands():
    parsed = parse_args(["--seed", "3", "search", "--mode", "one-qubit", "--dim", "2"])
    assert parsed.command == "search"
    assert parsed.params["seed"] == 3
    assert parsed.params["dim"] == 2
    assert parse_args(["catalog", "lookup", "--state", __file__]).command == "catalog lookup"


def test_sre_exact(state_file):
    result = invoke("sre", "--state", state_file(MAX_MAGIC_SEED), "--exact")
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["xi_exact"] == "7/16"
    assert payload["m"] == pytest.approx(0.8266785731844679, abs=1e-12)


def test_sre_qudit_factors(state_file):
    result = invoke("sre", "--state", state_file(MAX_MAGIC_SEED), "--factors", "4")
    assert result.exit_code == 0
    assert orjson.loads(result.stdout)["xi"] > 0


def test_orbit_of_computational_state(state_file, tmp_path):
    out = tmp_path / "orbit.json"
    result = runner.invoke(app, ["--json", "--out", str(out), "orbit", "--seed", str(state_file(computational_state(2)))])
    assert result.exit_code == 0
    payload = orjson.loads(out.read_bytes())
    assert payload["orbit_size"] == 60
    assert len(payload["trace"]) == 60


def test_wh_orbit(state_file):
    result = invoke("wh-orbit", "--state", state_file(MAX_MAGIC_SEED))
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert set(payload) == {"orbit_size", "states", "index_tuples"}
    assert payload["orbit_size"] == 16
    assert len(payload["index_tuples"]) == 16
    assert payload["index_tuples"][0] == [[0, 0], [0, 0]]


def test_circuit(state_file, tmp_path):
    circuit = tmp_path / "circuit.json"
    circuit.write_text('[{"gate":"T","qubit":0},{"gate":"T","qubit":1},{"gate":"CNOT","control":0,"target":1},{"gate":"T","qubit":1}]')
    result = invoke("circuit", "--state", state_file(PLUS_PLUS), "--circuit", circuit)
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["gates"] == ["T0", "T1", "CNOT01", "T1"]
    assert payload["m2"] == pytest.approx(0.8266785731844679, abs=1e-12)


def test_concurrence_of_state(state_file):
    result = invoke("concurrence", "--state", state_file(BELL))
    assert orjson.loads(result.stdout)["value"] == pytest.approx(1.0)


def test_search_one_qubit():
    result = invoke("search", "--mode", "one-qubit", "--dim", "2", "--starts", "12", "--seed", "7")
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["global_min"] == pytest.approx(2 / 3, abs=1e-9)
    assert payload["n_distinct_minimizers"] == len(payload["states"])


def test_catalog_commands(catalog_dir, state_file, rng):
    found = invoke("catalog", "lookup", "--catalog", catalog_dir, "--state", state_file(MAX_MAGIC_SEED))
    assert found.exit_code == 0
    assert orjson.loads(found.stdout)["kind"] == "magic2q"
    missing = invoke("catalog", "lookup", "--catalog", catalog_dir, "--state", state_file(random_state(4, rng), "r.json"))
    assert missing.exit_code == 1
    assert orjson.loads(missing.stdout) == {"found": False}


def test_structure_from_catalog(catalog_dir):
    result = invoke("structure", "--catalog", catalog_dir)
    assert result.exit_code == 0
    payload = orjson.loads(result.stdout)
    assert payload["stab_orbits"] == 15
    assert payload["magic_orbits"] == 30
    assert payload["families_of_5"] == 30
    assert payload["stab_families_of_5"] == 3


def test_concurrence_profile_from_catalog(catalog_dir):
    payload = orjson.loads(invoke("concurrence", "--catalog", catalog_dir).stdout)
    assert payload["stabilizer"]["histogram"] == {"0": 9, "1": 6}


def test_verify_claims_subset():
    result = invoke("verify-claims", "--only", "sic-bound-2-4", "--only", "bound-ordering")
    assert result.exit_code == 0
    reports = orjson.loads(result.stdout)
    assert [r["claim_id"] for r in reports] == ["bound-ordering", "sic-bound-2-4"]


def test_exit_codes(state_file):
    path = str(state_file(MAX_MAGIC_SEED))
    assert main(["--log-level", "ERROR", "sre", "--state", path]) == 0
    assert main(["--log-level", "ERROR", "sre", "--state", path, "--alpha", "1"]) == 1
    assert main(["search", "--mode", "bogus"]) == 2
    assert main(["search", "--mode", "one-qubit", "--dim", "4"]) == 2
    assert main(["concurrence"]) == 2
    assert main(["--log-level", "ERROR", "catalog", "lookup", "--catalog", "/nonexistent", "--state", path]) == 1
