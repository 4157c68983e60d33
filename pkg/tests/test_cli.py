"""Command-line interface: exit codes, output shapes, replay determinism."""

import json

import pytest

from sidl.cli import main
from sidl.corpus import corpus_path, corpus_source

NIM = str(corpus_path("nim"))


@pytest.fixture
def nim_script(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(json.dumps([
        {"chronon": 1, "player": "[alice]", "switch": "[main]", "action": "[3]"},
        {"chronon": 2, "player": "[bob]", "switch": "[main]", "action": "[3]"},
        {"chronon": 3, "player": "[alice]", "switch": "[main]", "action": "[3]"},
    ]))
    return str(path)


# -- validate ---------------------------------------------------------------


def test_validate_clean_definition(capsys):
    assert main(["validate", NIM]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_missing_file_is_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["validate", "/no/such/file.sidl"])
    assert err.value.code == 2


def test_validate_broken_definition(tmp_path, capsys):
    bad = tmp_path / "bad.sidl"
    bad.write_text("name(g).\nfact([x]).\n")
    assert main(["validate", str(bad)]) == 1
    assert "body-only" in capsys.readouterr().out


def test_validate_json_report(tmp_path, capsys):
    bad = tmp_path / "bad.sidl"
    bad.write_text("init([a], 0.0).\n")
    assert main(["validate", str(bad), "--json"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["findings"][0]["severity"] == "error"


def test_validate_parse_error(tmp_path):
    bad = tmp_path / "bad.sidl"
    bad.write_text("name(g.\n")
    assert main(["validate", str(bad)]) == 1


# -- run --------------------------------------------------------------------


def test_run_scripted_game(nim_script, capsys):
    assert main(["run", NIM, "--script", nim_script, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"chronons": 4,
                   "final_accounts": {"[alice]": 1.0, "[bob]": -1.0}}


def test_run_writes_deterministic_replay(nim_script, tmp_path, capsys):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    assert main(["run", NIM, "--script", nim_script,
                 "--seed", "9", "--out", str(out1)]) == 0
    assert main(["run", NIM, "--script", nim_script,
                 "--seed", "9", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header = json.loads(out1.read_text().splitlines()[0])
    assert header["seed"] == 9


def test_run_seed_env_fallback(nim_script, tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SIDL_SEED", "33")
    out = tmp_path / "r.jsonl"
    assert main(["run", NIM, "--script", nim_script, "--out", str(out)]) == 0
    assert json.loads(out.read_text().splitlines()[0])["seed"] == 33


def test_run_respects_max_chronons(capsys):
    rps = str(corpus_path("rps"))
    assert main(["run", rps, "--max-chronons", "5", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["chronons"] == 5


# -- analyze ----------------------------------------------------------------


def test_analyze_minimax(capsys):
    assert main(["analyze", NIM, "--mode", "minimax", "--prune-noop"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"] == {"[alice]": 1.0, "[bob]": -1.0}


def test_analyze_mc(capsys):
    assert main(["analyze", NIM, "--mode", "mc", "--playouts", "20",
                 "--max-chronons", "60"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["playouts"] == 20


def test_analyze_consistency_pass(capsys):
    assert main(["analyze", str(corpus_path("mcp3")),
                 "--mode", "consistency"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["passed"] is True


def test_analyze_consistency_violations_exit_nonzero(capsys):
    assert main(["analyze", str(corpus_path("mcp3_leaky")),
                 "--mode", "consistency"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["violations"]


def test_analyze_unsupported_game_reports_error(capsys):
    price = str(corpus_path("price_negotiation"))
    assert main(["analyze", price, "--mode", "minimax"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert "error" in report
