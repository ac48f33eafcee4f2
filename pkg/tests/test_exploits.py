from __future__ import annotations

import json
import pathlib

import pytest

from iotgraph.cvestore import CveRecord
from iotgraph.exploits import (
    EFFECT_KINDS,
    PRECONDITION_KINDS,
    classify_effect,
    classify_precondition,
    exploit_rule_parts,
    models_for,
)
from iotgraph.model import parse_config

CORPUS = json.loads(
    (pathlib.Path(__file__).resolve().parent / "data" / "classifier_corpus.json").read_text()
)["items"]


def record_from(item: dict) -> CveRecord:
    return CveRecord(
        cve_id=item["cve_id"],
        description=item["description"],
        attack_vector=item["attack_vector"],
        conf_impact=item["conf_impact"],
        integ_impact=item["integ_impact"],
        avail_impact=item["avail_impact"],
        impact_score=item["impact_score"],
        exploitability_score=item["exploitability_score"],
        year=item["year"],
    )


def make_record(desc, vector="network", c="none", i="none", a="none") -> CveRecord:
    return CveRecord(
        cve_id="CVE-2000-0001",
        description=desc,
        attack_vector=vector,
        conf_impact=c,
        integ_impact=i,
        avail_impact=a,
        impact_score=1.0,
        exploitability_score=1.0,
        year=2000,
    )


@pytest.mark.parametrize("item", CORPUS, ids=[it["cve_id"] for it in CORPUS])
def test_corpus_classification(item):
    rec = record_from(item)
    assert classify_precondition(rec, tuple(item["protocols"])) == item["expected_precondition"]
    assert classify_effect(rec) == item["expected_effect"]


def test_corpus_covers_every_kind():
    pres = {it["expected_precondition"] for it in CORPUS}
    effs = {it["expected_effect"] for it in CORPUS}
    assert pres == set(PRECONDITION_KINDS)
    assert effs == set(EFFECT_KINDS)


def test_classification_is_deterministic():
    for item in CORPUS:
        rec = record_from(item)
        runs = {
            (classify_precondition(rec, tuple(item["protocols"])), classify_effect(rec))
            for _ in range(3)
        }
        assert len(runs) == 1


def test_precondition_local_and_physical_pass_through():
    assert classify_precondition(make_record("x", vector="local"), ("wifi",)) == "local"
    assert classify_precondition(make_record("x", vector="physical"), ("wifi",)) == "physical"


def test_precondition_adjacent_sniff_forces_physical_radio_range():
    sniffy = make_record("an attacker can sniff the pairing traffic", vector="adjacent")
    quiet = make_record("an attacker can send crafted packets", vector="adjacent")
    assert classify_precondition(sniffy, ("wifi",)) == "adjacentPhysically"
    assert classify_precondition(quiet, ("wifi",)) == "adjacentLogically"


def test_precondition_low_power_reroutes_network_vector():
    rec = make_record("a crafted packet reaches the device", vector="network")
    assert classify_precondition(rec, ("zigbee",)) == "adjacentLogically"
    assert classify_precondition(rec, ("ble", "zwave")) == "adjacentLogically"
    assert classify_precondition(rec, ("wifi", "zigbee")) == "network"
    sniffy = make_record("an attacker who can eavesdrop on the link", vector="network")
    assert classify_precondition(sniffy, ("zigbee",)) == "adjacentPhysically"


def test_effect_keyword_priority_over_ladder():
    rec = make_record("attacker can execute arbitrary code", a="high")
    assert classify_effect(rec) == "root"
    rec = make_record("attacker takes over the device and gains full control")
    assert classify_effect(rec) == "deviceControl"


def test_effect_ladder_mechanism_availability_only():
    rec = make_record("a buffer overflow in the parser hangs the service", a="high")
    assert classify_effect(rec) == "dos"


def test_effect_ladder_mechanism_full_cia():
    rec = make_record("a use after free in the session layer", c="high", i="high", a="high")
    assert classify_effect(rec) == "root"


def test_effect_ladder_confidentiality_only():
    rec = make_record("the service exposes internal readings", c="high")
    assert classify_effect(rec) == "eventAccess"


def test_effect_ladder_integrity_only():
    rec = make_record("the service accepts unsigned writes", i="high")
    assert classify_effect(rec) == "commandInjection"


def test_effect_ladder_availability_high_without_mechanism():
    rec = make_record("repeated requests exhaust the service", a="high")
    assert classify_effect(rec) == "dos"


def test_effect_ladder_default_is_event_access():
    rec = make_record("an undocumented endpoint responds to probes")
    assert classify_effect(rec) == "eventAccess"


@pytest.fixture(scope="module")
def two_net_config():
    return parse_config(
        {
            "devices": [
                {"name": "Hub", "type": "gateway", "network": ["wifi1", "zigbee1"]},
            ],
            "networks": [
                {"name": "wifi1", "type": "Wifi"},
                {"name": "zigbee1", "type": "Zigbee"},
            ],
        },
        source="test",
    )


def network_map(cfg):
    return {n.atom: n for n in cfg.networks}


def test_models_fan_out_per_network_for_adjacency(two_net_config):
    cfg = two_net_config
    rec = make_record("crafted packets crash the hub", vector="adjacent", a="high")
    models = models_for(cfg.device("hub"), rec, network_map(cfg))
    assert [m.pre_term for m in models] == [
        "wifiAdjacentLogically(wifi1)",
        "zigbeeAdjacentLogically(zigbee1)",
    ]
    assert all(m.effect == "dos" for m in models)


def test_model_facts_render_vulnerability_pair(two_net_config):
    cfg = two_net_config
    rec = make_record(
        "a buffer overflow lets attackers execute arbitrary code as root",
        vector="adjacent", c="high", i="high", a="high",
    )
    model = models_for(cfg.device("hub"), rec, network_map(cfg))[0]
    exists, prop = model.facts()
    assert exists.render() == "vulExists(hub, 'CVE-2000-0001')"
    assert prop.render() == (
        "vulProperty('CVE-2000-0001', wifiAdjacentLogically(wifi1), rootPrivilege(hub))"
    )


def test_wifi_access_grants_wifi_networks_only_when_present(two_net_config):
    cfg = two_net_config
    rec = make_record(
        "the hub leaks the wifi password to anyone in range", vector="adjacent", c="high"
    )
    models = models_for(cfg.device("hub"), rec, network_map(cfg))
    assert {m.effect_term for m in models} == {"wifiAccess(wifi1)"}
    assert {m.network for m in models} == {"wifi1"}


def test_override_replaces_classified_kinds(two_net_config):
    cfg = two_net_config
    rec = make_record("crafted packets crash the hub", vector="adjacent", a="high")
    models = models_for(
        cfg.device("hub"), rec, network_map(cfg), override=("network", "root")
    )
    assert models[0].precondition == "network"
    assert models[0].effect == "root"
    with pytest.raises(ValueError):
        models_for(cfg.device("hub"), rec, network_map(cfg), override=("teleport", None))
    with pytest.raises(ValueError):
        models_for(cfg.device("hub"), rec, network_map(cfg), override=(None, "explode"))


def test_exploit_rule_parts_network_precondition(two_net_config):
    cfg = two_net_config
    rec = make_record("remote attackers gain full control of the hub", vector="network")
    model = models_for(cfg.device("hub"), rec, network_map(cfg))[0]
    head, body, label = exploit_rule_parts(model)
    assert head.render() == "attackerDeviceControl(hub)"
    assert [a.render() for a in body] == [
        "vulExists(hub, 'CVE-2000-0001')",
        "vulProperty('CVE-2000-0001', network, deviceControl(hub))",
        "attackerOnInternet",
    ]
    assert label == "exploit CVE-2000-0001 @ hub"


def test_exploit_rule_parts_adjacency_binds_network(two_net_config):
    cfg = two_net_config
    rec = make_record("an attacker can eavesdrop and access the video stream",
                      vector="adjacent", c="high")
    model = models_for(cfg.device("hub"), rec, network_map(cfg))[0]
    head, body, _ = exploit_rule_parts(model)
    assert head.render() == "attackerEventAccess(hub)"
    assert "inNetwork(hub, wifi1)" in [a.render() for a in body]
    assert "attackerAdjacentPhysically(wifi1)" in [a.render() for a in body]


def test_exploit_rule_parts_wifi_access_heads_network_membership(two_net_config):
    cfg = two_net_config
    rec = make_record("the hub leaks the wifi credentials", vector="adjacent", c="high")
    model = models_for(cfg.device("hub"), rec, network_map(cfg))[0]
    head, body, _ = exploit_rule_parts(model)
    assert head.render() == "attackerInNetwork(wifi1)"
    assert "attackerAdjacentPhysically(wifi1)" not in [a.render() for a in body]
    assert "attackerAdjacentLogically(wifi1)" in [a.render() for a in body]
