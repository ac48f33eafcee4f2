from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iotgraph.apps import (
    AppBindError,
    AppParseError,
    bind_app,
    parse_app_description,
    split_clauses,
    split_conjuncts,
)
from iotgraph.model import AppSpec, parse_config

HALL_LIGHT = "Turn on the hall light if someone comes home and the door opens."


def test_clause_split_renders_expected_shape():
    sem = parse_app_description(HALL_LIGHT)
    assert sem.render_split() == (
        "conditional:  ('AND', ['someone comes home', 'the door opens'])\n"
        "main:  ('NONE', ['Turn on the hall light'])"
    )


def test_phrase_extraction_renders_expected_shape():
    sem = parse_app_description(HALL_LIGHT)
    assert sem.render_phrases() == (
        "conditional clause: [(['someone'], ['comes']), (['the door'], ['opens'])]\n"
        "main clause: [(['the hall light'], ['Turn on'])]"
    )


def test_semantic_tuple():
    sem = parse_app_description(HALL_LIGHT)
    assert sem.as_tuple() == (
        "AND",
        ["motion sensor", "door contact sensor"],
        ["motion", "open"],
        "NONE",
        ["bulb"],
        ["on"],
    )


def test_when_clause_splits_like_if():
    sem = parse_app_description("Open the window when smoke is detected.")
    assert sem.trigger_conn == "NONE"
    assert sem.actions[0].role == "window opener"
    assert sem.actions[0].state == "open"
    assert sem.triggers[0].role == "smoke detector"
    assert sem.triggers[0].display_event == "smoke"


def test_or_trigger_connective():
    sem = parse_app_description(
        "Turn on the hall light if someone comes home or the doorbell rings."
    )
    assert sem.trigger_conn == "OR"
    assert [t.role for t in sem.triggers] == ["motion sensor", "doorbell"]


def test_conjunct_splitter_keeps_simple_sentence_whole():
    conn, parts = split_conjuncts("the door opens")
    assert (conn, parts) == ("NONE", ["the door opens"])


def test_clause_splitter_requires_trigger():
    with pytest.raises(AppParseError):
        split_clauses("Turn on the hall light.")


def test_unknown_role_raises():
    with pytest.raises(AppParseError):
        parse_app_description("Calibrate the flux capacitor if someone comes home.")


def test_voice_trigger_extracts_command():
    sem = parse_app_description(
        "Preheat the oven when the speaker hears preheat the oven."
    )
    assert sem.triggers[0].role == "speaker"
    assert sem.triggers[0].command == "preheat the oven"
    assert sem.actions[0].role == "oven"
    assert sem.actions[0].state == "on"


@given(st.sampled_from([
    HALL_LIGHT,
    "Open the window when smoke is detected.",
    "Unlock the front door when the speaker hears unlock the front door.",
    "Turn on the heater when the temperature drops.",
]))
def test_parse_is_deterministic(description):
    first = parse_app_description(description).as_tuple()
    second = parse_app_description(description).as_tuple()
    assert first == second


@pytest.fixture(scope="module")
def hall_config():
    return parse_config(
        {
            "devices": [
                {"name": "Hue Wifi Bulb", "type": "bulb", "network": ["wifi1"]},
                {"name": "Ring Contact Sensor", "type": "contact-sensor", "network": ["zigbee1"]},
                {"name": "Mijia Motion Sensor", "type": "motion-sensor", "network": ["zigbee1"]},
            ],
            "networks": [
                {"name": "wifi1", "type": "Wifi"},
                {"name": "zigbee1", "type": "Zigbee"},
            ],
            "apps": [
                {
                    "App name": "Hall Light: Welcome Home",
                    "description": HALL_LIGHT,
                    "device map": {
                        "bulb": "Hue Wifi Bulb",
                        "contact sensor": "Ring Contact Sensor",
                        "motion sensor": "Mijia Motion Sensor",
                    },
                }
            ],
        },
        source="test",
    )


def test_bind_emits_ground_rule(hall_config):
    app = hall_config.apps[0]
    sem = parse_app_description(app.description)
    bound = bind_app(app, sem, hall_config)
    assert len(bound.rules) == 1
    assert bound.rules[0].render() == (
        "on(hueWifiBulb) :-\n"
        "    bulb(hueWifiBulb),\n"
        "    reportsMotion(mijiaMotionSensor),\n"
        "    motionSensor(mijiaMotionSensor),\n"
        "    open(ringContactSensor),\n"
        "    contactSensor(ringContactSensor)."
    )
    assert bound.voice_commands == ()


def test_bind_or_trigger_emits_one_rule_per_alternative(hall_config):
    app = AppSpec(
        name="Arrival Light",
        description="Turn on the hall light if someone comes home or the door opens.",
        device_map=(
            ("bulb", "Hue Wifi Bulb"),
            ("contact sensor", "Ring Contact Sensor"),
            ("motion sensor", "Mijia Motion Sensor"),
        ),
    )
    bound = bind_app(app, parse_app_description(app.description), hall_config)
    assert len(bound.rules) == 2
    heads = {r.head.render() for r in bound.rules}
    assert heads == {"on(hueWifiBulb)"}
    bodies = [len(r.body) for r in bound.rules]
    assert bodies == [3, 3]


def test_bind_and_trigger_multiple_actions():
    cfg = parse_config(
        {
            "devices": [
                {"name": "Porch Light", "type": "bulb", "network": ["wifi1"]},
                {"name": "Hall Heater", "type": "heater", "network": ["wifi1"]},
                {"name": "Door Sensor", "type": "contact-sensor", "network": ["wifi1"]},
                {"name": "Walk Sensor", "type": "motion-sensor", "network": ["wifi1"]},
            ],
            "networks": [{"name": "wifi1", "type": "Wifi"}],
        },
        source="test",
    )
    app = AppSpec(
        name="Arrival Comfort",
        description=(
            "Turn on the porch light and turn on the hall heater "
            "if someone comes home and the door opens."
        ),
        device_map=(
            ("bulb", "Porch Light"),
            ("heater", "Hall Heater"),
            ("contact sensor", "Door Sensor"),
            ("motion sensor", "Walk Sensor"),
        ),
    )
    bound = bind_app(app, parse_app_description(app.description), cfg)
    assert len(bound.rules) == 2
    assert {r.head.render() for r in bound.rules} == {"on(porchLight)", "on(hallHeater)"}
    for rule in bound.rules:
        event_atoms = [a for a in rule.body if a.pred in ("reportsMotion", "open")]
        assert len(event_atoms) == 2


def test_bind_missing_role_raises(hall_config):
    app = AppSpec(
        name="Broken",
        description=HALL_LIGHT,
        device_map=(("bulb", "Hue Wifi Bulb"),),
    )
    with pytest.raises(AppBindError):
        bind_app(app, parse_app_description(app.description), hall_config)


def test_bind_unknown_device_raises(hall_config):
    app = AppSpec(
        name="Broken",
        description=HALL_LIGHT,
        device_map=(
            ("bulb", "Ghost Bulb"),
            ("contact sensor", "Ring Contact Sensor"),
            ("motion sensor", "Mijia Motion Sensor"),
        ),
    )
    with pytest.raises(AppBindError):
        bind_app(app, parse_app_description(app.description), hall_config)


def test_bind_voice_app_collects_commands(hall_config):
    cfg = parse_config(
        {
            "devices": [
                {"name": "Smart Oven", "type": "oven", "network": ["wifi1"]},
                {"name": "Echo Speaker", "type": "speaker", "network": ["wifi1"]},
            ],
            "networks": [{"name": "wifi1", "type": "Wifi"}],
        },
        source="test",
    )
    app = AppSpec(
        name="Voice Preheat",
        description="Preheat the oven when the speaker hears preheat the oven.",
        device_map=(("oven", "Smart Oven"), ("speaker", "Echo Speaker")),
    )
    bound = bind_app(app, parse_app_description(app.description), cfg)
    assert bound.voice_commands == ("preheatTheOven",)
    assert bound.rules[0].head.render() == "on(smartOven)"
    assert "speakerHears(preheatTheOven)" in [a.render() for a in bound.rules[0].body]
