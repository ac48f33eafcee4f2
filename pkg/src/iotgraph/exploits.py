"""Exploit modeling: classify CVEs into (precondition, effect) pairs.

The precondition says what footing the attacker needs before the exploit
(internet reach, radio range, network membership, a shell, or physical
contact); the effect says what the exploit yields (root, device control,
command injection, event access, wifi credentials, or denial of service).
Classification combines the CVSS attack vector, the network protocol of the
vulnerable device, and keyword matching on the CVE description. The keyword
tables live in ``data/exploit_keywords.json`` and can be extended without
touching code.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .cvestore import CveRecord
from .logic import Atom
from .model import LOW_POWER_PROTOCOLS, DeviceSpec, NetworkSpec

log = logging.getLogger(__name__)

PRECONDITION_KINDS = (
    "network",
    "adjacentPhysically",
    "adjacentLogically",
    "local",
    "physical",
)

EFFECT_KINDS = ("root", "deviceControl", "commandInjection", "eventAccess", "wifiAccess", "dos")

_EFFECT_HEAD_PRED = {
    "root": "attackerRoot",
    "deviceControl": "attackerDeviceControl",
    "commandInjection": "attackerCommandInjection",
    "eventAccess": "attackerEventAccess",
    "wifiAccess": "attackerInNetwork",
    "dos": "dos",
}

_EFFECT_TERM_FUNCTOR = {
    "root": "rootPrivilege",
    "deviceControl": "deviceControl",
    "commandInjection": "commandInjection",
    "eventAccess": "eventAccess",
    "dos": "dos",
}

_WS = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Lowercase and fold hyphen/slash punctuation into spaces."""

    return _WS.sub(" ", re.sub(r"[-/_]", " ", text.lower())).strip()


@dataclass(frozen=True)
class KeywordTables:
    sniff: tuple[re.Pattern, ...]
    mechanism: tuple[re.Pattern, ...]
    # Insertion order is the match priority.
    effects: tuple[tuple[str, tuple[re.Pattern, ...]], ...]


def load_keywords(path: str | Path | None = None) -> KeywordTables:
    if path is not None:
        raw = json.loads(Path(path).read_text())
    else:
        raw = json.loads(
            resources.files("iotgraph.data").joinpath("exploit_keywords.json").read_text()
        )
    compiled_effects = []
    for effect, patterns in raw["effect_patterns"].items():
        if effect not in EFFECT_KINDS:
            raise ValueError(f"unknown effect kind in keyword table: {effect!r}")
        compiled_effects.append((effect, tuple(re.compile(p) for p in patterns)))
    return KeywordTables(
        sniff=tuple(re.compile(p) for p in raw["sniff_patterns"]),
        mechanism=tuple(re.compile(p) for p in raw["mechanism_patterns"]),
        effects=tuple(compiled_effects),
    )


_DEFAULT_TABLES: KeywordTables | None = None


def default_keywords() -> KeywordTables:
    global _DEFAULT_TABLES
    if _DEFAULT_TABLES is None:
        _DEFAULT_TABLES = load_keywords()
    return _DEFAULT_TABLES


def _matches_any(patterns: tuple[re.Pattern, ...], text: str) -> bool:
    return any(p.search(text) for p in patterns)


def classify_precondition(
    record: CveRecord, protocols: tuple[str, ...] = (), tables: KeywordTables | None = None
) -> str:
    """Map a CVE record to a precondition kind.

    ``protocols`` are the protocols of the vulnerable device's networks;
    they matter because an attack vector of "network" against a device that
    only speaks a low-power protocol (zigbee, zwave, ble) still requires
    radio proximity.
    """

    tables = tables or default_keywords()
    text = normalize_text(record.description)
    vector = record.attack_vector
    if vector in ("local", "physical"):
        return vector
    low_power_only = bool(protocols) and all(p in LOW_POWER_PROTOCOLS for p in protocols)
    if vector == "network" and not low_power_only:
        return "network"
    # Adjacent attack vector, or a network vector against a low-power-only
    # device: sniffing-style wording means radio range suffices, otherwise
    # the attacker must already be a member of the network.
    if _matches_any(tables.sniff, text):
        return "adjacentPhysically"
    return "adjacentLogically"


def classify_effect(record: CveRecord, tables: KeywordTables | None = None) -> str:
    """Map a CVE record to an effect kind.

    Stage one matches effect keywords in priority order. Stage two (no
    keyword hit) falls back on the exploit mechanism plus the CVSS
    confidentiality/integrity/availability subscores.
    """

    tables = tables or default_keywords()
    text = normalize_text(record.description)
    for effect, patterns in tables.effects:
        if _matches_any(patterns, text):
            return effect
    c = record.conf_impact == "high"
    i = record.integ_impact == "high"
    a = record.avail_impact == "high"
    if _matches_any(tables.mechanism, text):
        if a and not c and not i:
            return "dos"
        if a and c and i:
            return "root"
    if c and not i:
        return "eventAccess"
    if i and not c:
        return "commandInjection"
    if a:
        return "dos"
    log.info(
        "%s: no effect keywords and no high CVSS subscore; defaulting to eventAccess",
        record.cve_id,
    )
    return "eventAccess"


@dataclass(frozen=True)
class ExploitModel:
    """One (device, CVE) pair classified and scoped to a concrete network."""

    cve_id: str
    device: str
    precondition: str
    effect: str
    pre_term: str
    effect_term: str
    network: str | None = None

    def facts(self) -> tuple[Atom, Atom]:
        return (
            Atom("vulExists", (self.device, self.cve_id)),
            Atom("vulProperty", (self.cve_id, self.pre_term, self.effect_term)),
        )


def _pre_term(kind: str, device: str, network: NetworkSpec | None) -> str:
    if kind == "network":
        return "network"
    if kind == "local":
        return f"local({device})"
    if kind == "physical":
        return f"physical({device})"
    assert network is not None
    suffix = "AdjacentPhysically" if kind == "adjacentPhysically" else "AdjacentLogically"
    return f"{network.protocol}{suffix}({network.atom})"


def models_for(
    device: DeviceSpec,
    record: CveRecord,
    networks: dict[str, NetworkSpec],
    tables: KeywordTables | None = None,
    override: tuple[str | None, str | None] | None = None,
) -> list[ExploitModel]:
    """Build exploit model instances for one CVE found on one device.

    Adjacency preconditions and wifi-access effects are bound to each of the
    device's concrete networks, so a gateway on two networks yields one
    model per network. ``override`` replaces the classified precondition
    and/or effect kind for this CVE.
    """

    device_nets = [networks[n] for n in device.networks]
    protocols = tuple(n.protocol for n in device_nets)
    pre_kind = classify_precondition(record, protocols, tables)
    effect = classify_effect(record, tables)
    if override is not None:
        if override[0] is not None:
            if override[0] not in PRECONDITION_KINDS:
                raise ValueError(f"unknown precondition kind {override[0]!r}")
            pre_kind = override[0]
        if override[1] is not None:
            if override[1] not in EFFECT_KINDS:
                raise ValueError(f"unknown effect kind {override[1]!r}")
            effect = override[1]

    if pre_kind in ("adjacentPhysically", "adjacentLogically"):
        pre_scopes: list[NetworkSpec | None] = list(device_nets)
        if not pre_scopes:
            log.warning(
                "%s on %s needs network adjacency but the device has no networks; skipping",
                record.cve_id,
                device.atom,
            )
            return []
    else:
        pre_scopes = [None]

    if effect == "wifiAccess":
        wifi_nets = [n for n in device_nets if n.protocol == "wifi"]
        grant_nets = wifi_nets or device_nets
        if not grant_nets:
            log.warning(
                "%s on %s grants network credentials but the device has no networks; skipping",
                record.cve_id,
                device.atom,
            )
            return []
        effect_terms = [
            (f"wifiAccess({n.atom})" if n.protocol == "wifi" else f"networkAccess({n.atom})", n)
            for n in grant_nets
        ]
    else:
        effect_terms = [(f"{_EFFECT_TERM_FUNCTOR[effect]}({device.atom})", None)]

    out = []
    for scope in pre_scopes:
        for effect_term, grant in effect_terms:
            out.append(
                ExploitModel(
                    cve_id=record.cve_id,
                    device=device.atom,
                    precondition=pre_kind,
                    effect=effect,
                    pre_term=_pre_term(pre_kind, device.atom, scope),
                    effect_term=effect_term,
                    network=(grant.atom if grant is not None else scope.atom if scope else None),
                )
            )
    return out


def exploit_rule_parts(model: ExploitModel) -> tuple[Atom, list[Atom], str]:
    """Ground head, body, and label for one exploit model's attack rule."""

    body = list(model.facts())
    if model.precondition == "network":
        body.append(Atom("attackerOnInternet"))
    elif model.precondition == "local":
        body.append(Atom("attackerLocal", (model.device,)))
    elif model.precondition == "physical":
        body.append(Atom("attackerPhysicalAccess", (model.device,)))
    else:
        assert model.network is not None
        scope = re.search(r"\(([A-Za-z0-9_]+)\)$", model.pre_term).group(1)
        body.append(Atom("inNetwork", (model.device, scope)))
        pred = (
            "attackerAdjacentPhysically"
            if model.precondition == "adjacentPhysically"
            else "attackerAdjacentLogically"
        )
        body.append(Atom(pred, (scope,)))

    if model.effect == "wifiAccess":
        head = Atom("attackerInNetwork", (model.network,))
    else:
        head_pred = _EFFECT_HEAD_PRED[model.effect]
        head = Atom(head_pred, (model.device,))
    label = f"exploit {model.cve_id} @ {model.device}"
    return head, body, label
