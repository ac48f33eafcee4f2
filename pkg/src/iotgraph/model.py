"""Deployment model: devices, networks, installed apps, attacker profile.

A configuration document is JSON with top-level keys ``devices``, ``networks``,
``apps``, ``attacker``, ``goals``. Devices and networks use the field names
``name``, ``type``, ``network``; apps use ``App name``, ``description``,
``device map``. Everything is validated against a closed device-type lexicon
and normalized to logic-friendly identifiers at parse time. All model types
are immutable after validation, so they are safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any


class ConfigError(ValueError):
    """Invalid configuration document."""


# The six physical channels devices can sense or tamper with.
CHANNELS = ("temperature", "humidity", "illuminance", "voice", "smoke", "water")

SCALAR_CHANNELS = ("temperature", "humidity", "illuminance")

PROTOCOLS = ("wifi", "zigbee", "zwave", "ble", "ethernet")

LOW_POWER_PROTOCOLS = frozenset({"zigbee", "zwave", "ble"})

# Sensor event keys -> (predicate, extra argument tuple appended after the
# sensor instance).
EVENT_ATOMS: dict[str, tuple[str, tuple[str, ...]]] = {
    "motion": ("reportsMotion", ()),
    "open": ("open", ()),
    "ring": ("reportsRing", ()),
    "smoke": ("reportsSmoke", ()),
    "water": ("reportsWater", ()),
    "high temperature": ("reportsHigh", ("temperature",)),
    "low temperature": ("reportsLow", ("temperature",)),
    "high humidity": ("reportsHigh", ("humidity",)),
    "low humidity": ("reportsLow", ("humidity",)),
    "high illuminance": ("reportsHigh", ("illuminance",)),
    "low illuminance": ("reportsLow", ("illuminance",)),
}


@dataclass(frozen=True)
class DeviceTypeInfo:
    """Role flags and rule-relevant vocabulary for one device type."""

    name: str
    predicate: str
    sensor: bool = False
    actuator: bool = False
    voice_emitter: bool = False
    voice_receiver: bool = False
    senses: frozenset[str] = frozenset()
    # (channel, level) pairs this type drives when switched on.
    affect_states: tuple[tuple[str, str], ...] = ()
    # Sensor event keys (see EVENT_ATOMS) this type reports and an attacker
    # with event access can spoof.
    events: tuple[str, ...] = ()
    # States an attacker with command injection can set.
    settable: tuple[str, ...] = ()

    @property
    def affects(self) -> frozenset[str]:
        out = {channel for channel, _ in self.affect_states}
        if self.voice_emitter:
            out.add("voice")
        return frozenset(out)


def _t(name: str, predicate: str, **kw: Any) -> DeviceTypeInfo:
    return DeviceTypeInfo(name, predicate, **kw)


_ON_OFF = ("on", "off")

DEVICE_TYPES: dict[str, DeviceTypeInfo] = {
    t.name: t
    for t in (
        _t("router", "router"),
        _t("gateway", "gateway"),
        _t("camera", "camera", actuator=True, voice_emitter=True, settable=_ON_OFF),
        _t(
            "speaker",
            "speaker",
            actuator=True,
            voice_emitter=True,
            voice_receiver=True,
            settable=_ON_OFF,
        ),
        _t("bulb", "bulb", actuator=True, affect_states=(("illuminance", "high"),), settable=_ON_OFF),
        _t("outlet", "outlet", actuator=True, settable=_ON_OFF),
        _t("lock", "lock", actuator=True, settable=("unlock", "locked")),
        _t("door-opener", "doorOpener", actuator=True, settable=("open",)),
        _t("oven", "oven", actuator=True, affect_states=(("smoke", "present"),), settable=_ON_OFF),
        _t("heater", "heater", actuator=True, affect_states=(("temperature", "high"),), settable=_ON_OFF),
        _t("ac", "ac", actuator=True, affect_states=(("temperature", "low"),), settable=_ON_OFF),
        _t(
            "humidifier",
            "humidifier",
            actuator=True,
            affect_states=(("humidity", "high"),),
            settable=_ON_OFF,
        ),
        _t("window-opener", "windowOpener", actuator=True, settable=("open",)),
        _t("valve", "valve", actuator=True, settable=_ON_OFF),
        _t("sprinkler", "sprinkler", actuator=True, affect_states=(("water", "present"),), settable=_ON_OFF),
        _t("stove", "stove", actuator=True, affect_states=(("smoke", "present"),), settable=_ON_OFF),
        _t("motion-sensor", "motionSensor", sensor=True, events=("motion",)),
        _t("contact-sensor", "contactSensor", sensor=True, events=("open",)),
        _t(
            "temperature-sensor",
            "temperatureSensor",
            sensor=True,
            senses=frozenset({"temperature"}),
            events=("high temperature", "low temperature"),
        ),
        _t(
            "humidity-sensor",
            "humiditySensor",
            sensor=True,
            senses=frozenset({"humidity"}),
            events=("high humidity", "low humidity"),
        ),
        _t(
            "light-sensor",
            "lightSensor",
            sensor=True,
            senses=frozenset({"illuminance"}),
            events=("high illuminance", "low illuminance"),
        ),
        _t(
            "smoke-detector",
            "smokeDetector",
            sensor=True,
            senses=frozenset({"smoke"}),
            events=("smoke",),
        ),
        _t(
            "water-leak-sensor",
            "waterLeakSensor",
            sensor=True,
            senses=frozenset({"water"}),
            events=("water",),
        ),
        _t("tv", "tv", actuator=True, voice_emitter=True, settable=_ON_OFF),
        _t("doorbell", "doorbell", sensor=True, events=("ring",)),
        _t(
            "thermostat",
            "thermostat",
            sensor=True,
            actuator=True,
            senses=frozenset({"temperature"}),
            events=("high temperature", "low temperature"),
            settable=_ON_OFF,
        ),
    )
}

assert len(DEVICE_TYPES) == 26

# Opener types whose "open" state is gated by an optional lock wiring.
OPENER_TYPES = frozenset({"door-opener", "window-opener"})


def role_flags(device_type: str) -> DeviceTypeInfo:
    """Look up the fixed role table entry for a device type."""

    try:
        return DEVICE_TYPES[device_type]
    except KeyError:
        raise ConfigError(f"unknown device type: {device_type!r}") from None


_TOKEN = re.compile(r"[A-Za-z0-9]+")


def normalize_name(name: str) -> str:
    """Normalize a display name to a logic identifier.

    Strips non-alphanumerics, camel-cases the remaining tokens, and
    lowercases the first letter, so "D-Link Router" becomes dLinkRouter.
    Idempotent: normalizing an already-normalized identifier is a no-op.
    """

    tokens = _TOKEN.findall(name)
    if not tokens:
        raise ConfigError(f"name {name!r} has no usable characters")
    camel = tokens[0] + "".join(t[0].upper() + t[1:] for t in tokens[1:])
    ident = camel[0].lower() + camel[1:]
    if ident[0].isdigit():
        raise ConfigError(f"name {name!r} normalizes to {ident!r}, which starts with a digit")
    return ident


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    atom: str
    protocol: str

    @property
    def low_power(self) -> bool:
        return self.protocol in LOW_POWER_PROTOCOLS


@dataclass(frozen=True)
class DeviceSpec:
    name: str
    atom: str
    device_type: str
    networks: tuple[str, ...] = ()
    physically_exposed: bool = False
    plugs_into: str | None = None
    locked_by: str | None = None
    supplied_by: str | None = None

    @property
    def info(self) -> DeviceTypeInfo:
        return DEVICE_TYPES[self.device_type]


@dataclass(frozen=True)
class AppSpec:
    name: str
    description: str
    device_map: tuple[tuple[str, str], ...] = ()

    def map_dict(self) -> dict[str, str]:
        return dict(self.device_map)


@dataclass(frozen=True)
class AttackerProfile:
    has_internet: bool = True
    radio_adjacent: tuple[str, ...] = ()
    physical_access: tuple[str, ...] = ()


@dataclass(frozen=True)
class SystemConfig:
    devices: tuple[DeviceSpec, ...]
    networks: tuple[NetworkSpec, ...]
    apps: tuple[AppSpec, ...] = ()
    attacker: AttackerProfile = field(default_factory=AttackerProfile)
    goals: tuple[str, ...] = ()

    def device(self, key: str) -> DeviceSpec:
        for d in self.devices:
            if key in (d.atom, d.name):
                return d
        raise ConfigError(f"unknown device: {key!r}")

    def network(self, key: str) -> NetworkSpec:
        for n in self.networks:
            if key in (n.atom, n.name):
                return n
        raise ConfigError(f"unknown network: {key!r}")

    def device_index(self) -> dict[str, DeviceSpec]:
        """Index devices by both display name and normalized atom."""

        out: dict[str, DeviceSpec] = {}
        for d in self.devices:
            out[d.name] = d
            out[d.atom] = d
        return out

    def to_document(self) -> str:
        """Serialize back to canonical JSON text.

        parse_config(config.to_document()) reproduces the config, and the
        text is byte-stable for identical configs.
        """

        display = {n.atom: n.name for n in self.networks}
        display.update({d.atom: d.name for d in self.devices})
        doc: dict[str, Any] = {"devices": [], "networks": []}
        for d in self.devices:
            item: dict[str, Any] = {
                "name": d.name,
                "type": d.device_type,
                "network": [display[n] for n in d.networks],
            }
            if d.physically_exposed:
                item["physically_exposed"] = True
            if d.plugs_into:
                item["plugs_into"] = display[d.plugs_into]
            if d.locked_by:
                item["locked_by"] = display[d.locked_by]
            if d.supplied_by:
                item["supplied_by"] = display[d.supplied_by]
            doc["devices"].append(item)
        for n in self.networks:
            doc["networks"].append({"name": n.name, "type": n.protocol})
        if self.apps:
            doc["apps"] = [
                {
                    "App name": a.name,
                    "description": a.description,
                    "device map": dict(a.device_map),
                }
                for a in self.apps
            ]
        doc["attacker"] = {
            "has_internet": self.attacker.has_internet,
            "radio_adjacent": [display[n] for n in self.attacker.radio_adjacent],
            "physical_access": [display[d] for d in self.attacker.physical_access],
        }
        if self.goals:
            doc["goals"] = list(self.goals)
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _string_field(stanza: dict, key: str, where: str) -> str:
    value = stanza.get(key)
    _require(isinstance(value, str) and value.strip() != "", f"{where}: missing or empty {key!r}")
    return value


def parse_config(document: str | dict, source: str = "config") -> SystemConfig:
    """Parse and validate a configuration document (JSON text or dict)."""

    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{source}: syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    else:
        raw = document
    _require(isinstance(raw, dict), f"{source}: top level must be an object")
    known = {"devices", "networks", "apps", "attacker", "goals"}
    unknown = set(raw) - known
    _require(not unknown, f"{source}: unknown top-level keys {sorted(unknown)}")

    atoms: dict[str, str] = {}

    def claim(name: str, what: str) -> str:
        atom = normalize_name(name)
        if atom in atoms:
            raise ConfigError(
                f"{source}: {what} {name!r} normalizes to {atom!r}, "
                f"already taken by {atoms[atom]!r}"
            )
        atoms[atom] = name
        return atom

    networks: list[NetworkSpec] = []
    for stanza in raw.get("networks", []):
        _require(isinstance(stanza, dict), f"{source}: network stanza must be an object")
        name = _string_field(stanza, "name", f"{source}: network")
        proto = _string_field(stanza, "type", f"{source}: network {name!r}").lower()
        _require(proto in PROTOCOLS, f"{source}: network {name!r}: unknown protocol {proto!r}")
        networks.append(NetworkSpec(name, claim(name, "network"), proto))
    net_by_name = {n.name: n for n in networks}
    net_by_name.update({n.atom: n for n in networks})

    devices: list[DeviceSpec] = []
    for stanza in raw.get("devices", []):
        _require(isinstance(stanza, dict), f"{source}: device stanza must be an object")
        name = _string_field(stanza, "name", f"{source}: device")
        where = f"{source}: device {name!r}"
        dtype = _string_field(stanza, "type", where).lower()
        _require(dtype in DEVICE_TYPES, f"{where}: unknown device type {dtype!r}")
        nets = stanza.get("network", [])
        if isinstance(nets, str):
            nets = [nets]
        _require(isinstance(nets, list), f"{where}: network must be a list")
        net_atoms = []
        for net in nets:
            _require(net in net_by_name, f"{where}: unknown network {net!r}")
            net_atoms.append(net_by_name[net].atom)
        _require(len(set(net_atoms)) == len(net_atoms), f"{where}: duplicate network entries")
        exposed = stanza.get("physically_exposed", False)
        _require(isinstance(exposed, bool), f"{where}: physically_exposed must be a boolean")
        devices.append(
            DeviceSpec(
                name=name,
                atom=claim(name, "device"),
                device_type=dtype,
                networks=tuple(net_atoms),
                physically_exposed=exposed,
                plugs_into=stanza.get("plugs_into"),
                locked_by=stanza.get("locked_by"),
                supplied_by=stanza.get("supplied_by"),
            )
        )

    dev_by_name = {d.name: d for d in devices}
    dev_by_name.update({d.atom: d for d in devices})

    def resolve_wiring(d: DeviceSpec, key: str, target: str | None, want: str) -> str | None:
        if target is None:
            return None
        _require(isinstance(target, str), f"{source}: device {d.name!r}: {key} must be a string")
        ref = dev_by_name.get(target)
        _require(ref is not None, f"{source}: device {d.name!r}: {key} names unknown device {target!r}")
        _require(
            ref.device_type == want,
            f"{source}: device {d.name!r}: {key} target {target!r} must be a {want}, "
            f"not a {ref.device_type}",
        )
        return ref.atom

    resolved: list[DeviceSpec] = []
    for d in devices:
        resolved.append(
            DeviceSpec(
                name=d.name,
                atom=d.atom,
                device_type=d.device_type,
                networks=d.networks,
                physically_exposed=d.physically_exposed,
                plugs_into=resolve_wiring(d, "plugs_into", d.plugs_into, "outlet"),
                locked_by=resolve_wiring(d, "locked_by", d.locked_by, "lock"),
                supplied_by=resolve_wiring(d, "supplied_by", d.supplied_by, "valve"),
            )
        )
        if d.locked_by is not None:
            _require(
                d.device_type in OPENER_TYPES,
                f"{source}: device {d.name!r}: locked_by only applies to openers",
            )

    apps: list[AppSpec] = []
    for stanza in raw.get("apps", []):
        _require(isinstance(stanza, dict), f"{source}: app stanza must be an object")
        name = _string_field(stanza, "App name", f"{source}: app")
        where = f"{source}: app {name!r}"
        description = _string_field(stanza, "description", where)
        device_map = stanza.get("device map", {})
        _require(isinstance(device_map, dict), f"{where}: device map must be an object")
        for role, target in device_map.items():
            _require(isinstance(role, str) and role.strip() != "", f"{where}: empty role key")
            _require(
                isinstance(target, str) and target in dev_by_name,
                f"{where}: device map role {role!r} names unknown device {target!r}",
            )
        apps.append(AppSpec(name, description, tuple(device_map.items())))

    attacker_raw = raw.get("attacker", {})
    _require(isinstance(attacker_raw, dict), f"{source}: attacker must be an object")
    unknown = set(attacker_raw) - {"has_internet", "radio_adjacent", "physical_access"}
    _require(not unknown, f"{source}: attacker: unknown keys {sorted(unknown)}")
    has_internet = attacker_raw.get("has_internet", True)
    _require(isinstance(has_internet, bool), f"{source}: attacker: has_internet must be a boolean")
    if "radio_adjacent" in attacker_raw:
        radio = []
        for net in attacker_raw["radio_adjacent"]:
            _require(net in net_by_name, f"{source}: attacker: unknown network {net!r}")
            spec = net_by_name[net]
            _require(
                spec.protocol != "ethernet",
                f"{source}: attacker: radio adjacency to wired network {net!r} is meaningless",
            )
            radio.append(spec.atom)
    else:
        radio = [n.atom for n in networks if n.protocol != "ethernet"]
    if "physical_access" in attacker_raw:
        touch = []
        for dev in attacker_raw["physical_access"]:
            _require(dev in dev_by_name, f"{source}: attacker: unknown device {dev!r}")
            touch.append(dev_by_name[dev].atom)
    else:
        touch = [d.atom for d in resolved if d.physically_exposed]

    goals_raw = raw.get("goals", [])
    _require(isinstance(goals_raw, list), f"{source}: goals must be a list")
    goals = []
    for g in goals_raw:
        _require(isinstance(g, str) and g.strip() != "", f"{source}: goals must be atom strings")
        goals.append(g.strip())

    return SystemConfig(
        devices=tuple(resolved),
        networks=tuple(networks),
        apps=tuple(apps),
        attacker=AttackerProfile(has_internet, tuple(radio), tuple(touch)),
        goals=tuple(goals),
    )
