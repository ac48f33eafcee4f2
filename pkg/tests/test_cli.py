from __future__ import annotations

import json

import pytest

from iotgraph.cli import main

from conftest import FEED_PATH, FIXTURES


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("IOTGRAPH_STORE", raising=False)


def test_ingest_reports_counts(tmp_path, capsys):
    store = str(tmp_path / "store.db")
    code = main(["ingest", "--store", store, str(FEED_PATH)])
    out = capsys.readouterr().out
    assert code == 0
    assert "20 records added, 0 skipped" in out
    assert "20 records (20 new, 0 skipped)" in out


def test_ingest_bad_feed_exits_4(tmp_path, capsys):
    store = str(tmp_path / "store.db")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["ingest", "--store", store, str(bad)])
    err = capsys.readouterr().err
    assert code == 4
    assert err.startswith("error:")


def test_scan_lists_matches(store_path, capsys):
    code = main(["scan", "--store", store_path, "D-Link Router"])
    out = capsys.readouterr().out
    assert code == 0
    assert "D-Link Router: 1 match(es)" in out
    assert "CVE-2020-8864 [adjacent]" in out


def test_scan_store_from_environment(store_path, capsys, monkeypatch):
    monkeypatch.setenv("IOTGRAPH_STORE", store_path)
    code = main(["scan", "Arlo Basestation"])
    out = capsys.readouterr().out
    assert code == 0
    assert "Arlo Basestation: 2 match(es)" in out


def test_no_store_anywhere_exits_2(capsys):
    code = main(["scan", "D-Link Router"])
    err = capsys.readouterr().err
    assert code == 2
    assert "no CVE store given" in err


def test_missing_store_file_exits_3(tmp_path, capsys):
    code = main(["scan", "--store", str(tmp_path / "nope.db"), "D-Link Router"])
    err = capsys.readouterr().err
    assert code == 3
    assert err.startswith("error:")


def test_model_prints_classification(store_path, capsys):
    code = main(["model", "--store", store_path, "--config", fixture_path("listing10")])
    out = capsys.readouterr().out
    assert code == 0
    assert (
        "CVE-2020-8864 @ dLinkRouter: precondition=adjacentLogically effect=root" in out
    )
    assert "vulProperty('CVE-2020-8864', wifiAdjacentLogically(wifi1), rootPrivilege(dLinkRouter))" in out


def test_model_applies_overrides_file(store_path, tmp_path, capsys):
    overrides = tmp_path / "overrides.json"
    overrides.write_text(
        json.dumps({"CVE-2020-8864": {"precondition": "network", "effect": "dos"}})
    )
    code = main(
        [
            "model",
            "--store",
            store_path,
            "--config",
            fixture_path("listing10"),
            "--overrides",
            str(overrides),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "CVE-2020-8864 @ dLinkRouter: precondition=network effect=dos" in out


def test_model_rejects_malformed_overrides(store_path, tmp_path, capsys):
    overrides = tmp_path / "overrides.json"
    overrides.write_text(json.dumps({"CVE-2020-8864": {"verdict": "scary"}}))
    code = main(
        [
            "model",
            "--store",
            store_path,
            "--config",
            fixture_path("listing10"),
            "--overrides",
            str(overrides),
        ]
    )
    assert code == 2


def test_missing_config_exits_2(store_path, capsys):
    code = main(["model", "--store", store_path, "--config", "/nonexistent.json"])
    err = capsys.readouterr().err
    assert code == 2
    assert "cannot read config" in err


def test_invalid_config_exits_2(store_path, tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"devices": [{"name": "X", "type": "ufo", "network": ["n"]}]}))
    code = main(["model", "--store", store_path, "--config", str(cfg)])
    err = capsys.readouterr().err
    assert code == 2
    assert "invalid config" in err


def test_extract_apps_prints_semantics(capsys):
    code = main(["extract-apps", "--config", fixture_path("hall_light")])
    out = capsys.readouterr().out
    assert code == 0
    assert "== Hall Light: Welcome Home" in out
    assert "conditional:  ('AND', ['someone comes home', 'the door opens'])" in out
    assert "tuple: ('AND'" in out
    assert "on(hueWifiBulb) :-" in out


def test_extract_apps_strict_exits_4_on_failure(tmp_path, capsys):
    cfg = tmp_path / "apps.json"
    cfg.write_text(
        json.dumps(
            {
                "devices": [{"name": "Desk Bulb", "type": "bulb", "network": ["wifi1"]}],
                "networks": [{"name": "wifi1", "type": "Wifi"}],
                "apps": [
                    {
                        "App name": "No Trigger",
                        "description": "Turn on the desk bulb.",
                        "device map": {"bulb": "Desk Bulb"},
                    }
                ],
            }
        )
    )
    assert main(["extract-apps", "--config", str(cfg)]) == 0
    capsys.readouterr()
    code = main(["extract-apps", "--config", str(cfg), "--strict"])
    out = capsys.readouterr().out
    assert code == 4
    assert "parse error:" in out


def test_compile_to_stdout(store_path, capsys):
    code = main(["compile", "--store", store_path, "--config", fixture_path("listing10")])
    out = capsys.readouterr().out
    assert code == 0
    assert "% ==== facts: system configuration ====" in out
    assert "router(dLinkRouter)." in out


def test_compile_to_file_with_goals(store_path, tmp_path, capsys):
    out_file = tmp_path / "program.pl"
    code = main(
        [
            "compile",
            "--store",
            store_path,
            "--config",
            fixture_path("listing10"),
            "--out",
            str(out_file),
            "--goals",
            "attackerRoot(dLinkRouter)",
        ]
    )
    stdout = capsys.readouterr().out
    assert code == 0
    assert f"wrote {out_file}" in stdout
    assert "attackGoal(attackerRoot(dLinkRouter))." in out_file.read_text()


def test_bad_goal_atom_exits_2(store_path, capsys):
    code = main(
        [
            "compile",
            "--store",
            store_path,
            "--config",
            fixture_path("listing10"),
            "--goals",
            "not an atom(",
        ]
    )
    err = capsys.readouterr().err
    assert code == 2
    assert "bad goal" in err


def test_analyze_writes_outputs(store_path, tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(
        [
            "analyze",
            "--store",
            store_path,
            "--config",
            fixture_path("fig2"),
            "--out",
            str(out_dir),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "goal unlock(yaleDoorlock): REACHABLE depth 14" in out
    for name in ("program.pl", "attack_graph.json", "attack_graph.dot",
                 "metrics_report.txt", "run_manifest.json"):
        assert (out_dir / name).exists(), name


def test_analyze_fail_on_reachable(store_path, tmp_path, capsys):
    code = main(
        [
            "analyze",
            "--store",
            store_path,
            "--config",
            fixture_path("fig2"),
            "--out",
            str(tmp_path / "run"),
            "--fail-on-reachable",
        ]
    )
    capsys.readouterr()
    assert code == 1


def test_analyze_text_format(store_path, tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(
        [
            "analyze",
            "--store",
            store_path,
            "--config",
            fixture_path("system28"),
            "--out",
            str(out_dir),
            "--format",
            "text",
        ]
    )
    capsys.readouterr()
    assert code == 0
    assert (out_dir / "attack_graph.txt").exists()
    assert not (out_dir / "attack_graph.dot").exists()


def test_metrics_prints_report(store_path, capsys):
    code = main(["metrics", "--store", store_path, "--config", fixture_path("fig2")])
    out = capsys.readouterr().out
    assert code == 0
    assert "cve universe:" in out
    assert "goal unlock(yaleDoorlock) (depth 14)" in out


def test_synth_prints_config(capsys):
    code = main(["synth", "--devices", "10", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    doc = json.loads(out)
    assert len(doc["devices"]) == 10


def test_synth_to_file(tmp_path, capsys):
    out_file = tmp_path / "synth.json"
    code = main(["synth", "--devices", "12", "--seed", "1", "--out", str(out_file)])
    capsys.readouterr()
    assert code == 0
    assert len(json.loads(out_file.read_text())["devices"]) == 12


def test_synth_too_small_exits_2(capsys):
    code = main(["synth", "--devices", "1"])
    err = capsys.readouterr().err
    assert code == 2
    assert "synthesis failed" in err
