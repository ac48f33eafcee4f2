"""Compile a deployment into a ground Horn program.

Three ingredients meet here: facts translated from the system configuration,
exploit rules instantiated from classified CVEs, and the static rule
libraries (attacker privilege propagation, physical dependencies, attacker
capabilities over actuators/sensors/voice). Static libraries are written
with variables for readability; grounding joins their body atoms against
the fact base and falls back on named constant pools (devices, networks,
voice commands) for variables the facts cannot bind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .apps import BoundApp
from .exploits import ExploitModel, exploit_rule_parts
from .logic import Atom, HornRule, LogicError, LogicProgram, render_fact
from .model import DEVICE_TYPES, EVENT_ATOMS, OPENER_TYPES, SCALAR_CHANNELS, SystemConfig

# Predicates that appear in the fact base (as opposed to derived conditions).
STATIC_FACT_PREDS = frozenset(
    {info.predicate for info in DEVICE_TYPES.values()}
    | {"wifi", "zigbee", "zwave", "ble", "ethernet"}
    | {"inNetwork", "plugInto", "lockedBy", "suppliedBy", "physicallyExposed", "lockFree"}
    | {"vulExists", "vulProperty"}
    | {"attackerOnInternet", "attackerRadioAdjacent", "attackerPhysicalAccess"}
)


def _var(name: str) -> str:
    return name[0].upper() + name[1:]


# ---------------------------------------------------------------------------
# Configuration facts


def device_fact_block(config: SystemConfig, atom: str) -> list[Atom]:
    d = config.device(atom)
    info = d.info
    block = [Atom(info.predicate, (d.atom,))]
    for net in d.networks:
        block.append(Atom("inNetwork", (d.atom, net)))
    if d.physically_exposed:
        block.append(Atom("physicallyExposed", (d.atom,)))
    if d.plugs_into:
        block.append(Atom("plugInto", (d.atom, d.plugs_into)))
    if d.locked_by:
        block.append(Atom("lockedBy", (d.atom, d.locked_by)))
    elif d.device_type in OPENER_TYPES:
        block.append(Atom("lockFree", (d.atom,)))
    if d.supplied_by:
        block.append(Atom("suppliedBy", (d.atom, d.supplied_by)))
    return block


def network_fact_block(config: SystemConfig) -> list[Atom]:
    return [Atom(n.protocol, (n.atom,)) for n in config.networks]


def config_fact_blocks(config: SystemConfig) -> list[list[Atom]]:
    blocks = [device_fact_block(config, d.atom) for d in config.devices]
    net_block = network_fact_block(config)
    if net_block:
        blocks.append(net_block)
    return blocks


def attacker_facts(config: SystemConfig) -> list[Atom]:
    out = []
    if config.attacker.has_internet:
        out.append(Atom("attackerOnInternet"))
    for net in config.attacker.radio_adjacent:
        out.append(Atom("attackerRadioAdjacent", (net,)))
    for dev in config.attacker.physical_access:
        out.append(Atom("attackerPhysicalAccess", (dev,)))
    return out


def render_system_facts(config: SystemConfig) -> str:
    """Device and network facts as clause text, one blank line per block."""

    blocks = config_fact_blocks(config)
    return "\n\n".join("\n".join(render_fact(a) for a in block) for block in blocks) + "\n"


# ---------------------------------------------------------------------------
# Static rule libraries


def build_propagation_rules() -> list[HornRule]:
    """How attacker privileges imply one another."""

    d, n = "D", "N"
    rules = [
        HornRule(
            Atom("attackerDeviceControl", (d,)),
            (Atom("attackerRoot", (d,)),),
            label="root grants device control",
            var_domains=(("D", "devices"),),
        ),
        HornRule(
            Atom("attackerInNetwork", (n,)),
            (Atom("attackerRoot", (d,)), Atom("inNetwork", (d, n))),
            label="rooted device joins its networks",
        ),
        HornRule(
            Atom("attackerCommandInjection", (d,)),
            (Atom("attackerDeviceControl", (d,)),),
            label="device control grants command injection",
            var_domains=(("D", "devices"),),
        ),
        HornRule(
            Atom("attackerEventAccess", (d,)),
            (Atom("attackerDeviceControl", (d,)),),
            label="device control grants event access",
            var_domains=(("D", "devices"),),
        ),
        HornRule(
            Atom("attackerLocal", (d,)),
            (Atom("attackerRoot", (d,)),),
            label="root grants local access",
            var_domains=(("D", "devices"),),
        ),
        HornRule(
            Atom("attackerAdjacentPhysically", (n,)),
            (Atom("attackerRadioAdjacent", (n,)),),
            label="radio range grants physical adjacency",
        ),
        HornRule(
            Atom("attackerAdjacentLogically", (n,)),
            (Atom("attackerInNetwork", (n,)),),
            label="network membership grants logical adjacency",
            var_domains=(("N", "networks"),),
        ),
        HornRule(
            Atom("attackerAdjacentPhysically", (n,)),
            (Atom("attackerAdjacentLogically", (n,)),),
            label="logical adjacency implies physical adjacency",
            var_domains=(("N", "networks"),),
        ),
        HornRule(
            Atom("off", (d,)),
            (Atom("dos", (d,)),),
            label="denial of service turns the device off",
            var_domains=(("D", "devices"),),
        ),
    ]
    return rules


def build_dependency_rules() -> list[HornRule]:
    """Physical couplings between devices, direct and via shared channels."""

    rules = []
    # Direct: electrical and utility supply lines.
    rules.append(
        HornRule(
            Atom("off", ("Device",)),
            (
                Atom("plugInto", ("Device", "Outlet")),
                Atom("outlet", ("Outlet",)),
                Atom("off", ("Outlet",)),
            ),
            label="power cut through outlet",
        )
    )
    rules.append(
        HornRule(
            Atom("off", ("Device",)),
            (
                Atom("suppliedBy", ("Device", "Valve")),
                Atom("valve", ("Valve",)),
                Atom("off", ("Valve",)),
            ),
            label="supply cut through valve",
        )
    )
    # Indirect, actuator side: switching a device on drives its channel.
    for info in DEVICE_TYPES.values():
        v = _var(info.predicate)
        for channel, level in info.affect_states:
            if channel in SCALAR_CHANNELS:
                head = Atom(level, (channel,))
            else:
                head = Atom(channel)
            rules.append(
                HornRule(
                    head,
                    (Atom("on", (v,)), Atom(info.predicate, (v,))),
                    label=f"{info.name} drives {channel}",
                )
            )
    # Indirect, sensor side: a driven channel is what sensors report.
    for info in DEVICE_TYPES.values():
        v = _var(info.predicate)
        for channel in sorted(info.senses):
            if channel in SCALAR_CHANNELS:
                for level, pred in (("high", "reportsHigh"), ("low", "reportsLow")):
                    rules.append(
                        HornRule(
                            Atom(pred, (v, channel)),
                            (Atom(level, (channel,)), Atom(info.predicate, (v,))),
                            label=f"{info.name} reports {level} {channel}",
                        )
                    )
            else:
                event_pred = {"smoke": "reportsSmoke", "water": "reportsWater"}[channel]
                rules.append(
                    HornRule(
                        Atom(event_pred, (v,)),
                        (Atom(channel), Atom(info.predicate, (v,))),
                        label=f"{info.name} reports {channel}",
                    )
                )
    return rules


def build_voice_rules() -> list[HornRule]:
    """Voice is a channel: controlled emitters speak, speakers listen."""

    rules = []
    for info in DEVICE_TYPES.values():
        if not info.voice_emitter:
            continue
        v = _var(info.predicate)
        rules.append(
            HornRule(
                Atom("voiceCommand", ("Cmd",)),
                (Atom("attackerDeviceControl", (v,)), Atom(info.predicate, (v,))),
                label=f"controlled {info.name} plays voice commands",
                var_domains=(("Cmd", "commands"),),
            )
        )
    rules.append(
        HornRule(
            Atom("speakerHears", ("Cmd",)),
            (Atom("voiceCommand", ("Cmd",)), Atom("speaker", ("S",))),
            label="a speaker hears played commands",
            var_domains=(("Cmd", "commands"),),
        )
    )
    return rules


def build_capability_rules() -> list[HornRule]:
    """What injected commands and spoofed events let the attacker set."""

    rules = []
    for info in DEVICE_TYPES.values():
        v = _var(info.predicate)
        for state in info.settable:
            if state == "open" and info.name in OPENER_TYPES:
                rules.append(
                    HornRule(
                        Atom("open", (v,)),
                        (
                            Atom("attackerCommandInjection", (v,)),
                            Atom(info.predicate, (v,)),
                            Atom("lockFree", (v,)),
                        ),
                        label=f"injected open command on unlatched {info.name}",
                    )
                )
                rules.append(
                    HornRule(
                        Atom("open", (v,)),
                        (
                            Atom("attackerCommandInjection", (v,)),
                            Atom(info.predicate, (v,)),
                            Atom("lockedBy", (v, "L")),
                            Atom("lock", ("L",)),
                            Atom("unlock", ("L",)),
                        ),
                        label=f"injected open command on unlocked {info.name}",
                    )
                )
            else:
                rules.append(
                    HornRule(
                        Atom(state, (v,)),
                        (Atom("attackerCommandInjection", (v,)), Atom(info.predicate, (v,))),
                        label=f"injected {state} command on {info.name}",
                    )
                )
        for event in info.events:
            pred, extra = EVENT_ATOMS[event]
            rules.append(
                HornRule(
                    Atom(pred, (v, *extra)),
                    (Atom("attackerEventAccess", (v,)), Atom(info.predicate, (v,))),
                    label=f"spoofed {event} event on {info.name}",
                )
            )
    return rules


_SCHEMA_PRE = {
    "network": ("network", (Atom("attackerOnInternet"),)),
    "adjacentPhysically": (
        "adjacentPhysically(N)",
        (Atom("inNetwork", ("D", "N")), Atom("attackerAdjacentPhysically", ("N",))),
    ),
    "adjacentLogically": (
        "adjacentLogically(N)",
        (Atom("inNetwork", ("D", "N")), Atom("attackerAdjacentLogically", ("N",))),
    ),
    "local": ("local(D)", (Atom("attackerLocal", ("D",)),)),
    "physical": ("physical(D)", (Atom("attackerPhysicalAccess", ("D",)),)),
}

_SCHEMA_EFFECT = {
    "root": ("rootPrivilege(D)", Atom("attackerRoot", ("D",))),
    "deviceControl": ("deviceControl(D)", Atom("attackerDeviceControl", ("D",))),
    "commandInjection": ("commandInjection(D)", Atom("attackerCommandInjection", ("D",))),
    "eventAccess": ("eventAccess(D)", Atom("attackerEventAccess", ("D",))),
    "wifiAccess": ("wifiAccess(N2)", Atom("attackerInNetwork", ("N2",))),
    "dos": ("dos(D)", Atom("dos", ("D",))),
}


def build_exploit_schemas() -> list[HornRule]:
    """The thirty generic exploit rules, one per (precondition, effect).

    These document the semantics; the reasoner works on rules instantiated
    per classified CVE, whose vulProperty terms carry concrete protocol
    prefixes and network scopes.
    """

    out = []
    for pre_kind, (pre_term, pre_atoms) in _SCHEMA_PRE.items():
        for effect, (effect_term, head) in _SCHEMA_EFFECT.items():
            body = [
                Atom("vulExists", ("D", "V")),
                Atom("vulProperty", ("V", pre_term, effect_term)),
                *pre_atoms,
            ]
            out.append(
                HornRule(
                    head,
                    tuple(body),
                    label=f"exploit schema: {effect} via {pre_kind}",
                )
            )
    return out


# ---------------------------------------------------------------------------
# Grounding


def _unify(atom: Atom, fact: Atom, binding: dict[str, str]) -> dict[str, str] | None:
    if atom.pred != fact.pred or len(atom.args) != len(fact.args):
        return None
    out = dict(binding)
    for a, f in zip(atom.args, fact.args):
        if a[0].isupper() and a.isidentifier():
            bound = out.get(a)
            if bound is None:
                out[a] = f
            elif bound != f:
                return None
        elif a != f:
            return None
    return out


def ground_static_rules(
    rules: list[HornRule], facts: list[Atom], domains: dict[str, list[str]]
) -> list[HornRule]:
    """Instantiate variable rules against the fact base.

    Body atoms whose predicate lives in the fact base bind variables by
    joining; variables left over take values from the rule's declared
    fallback domains.
    """

    fact_index: dict[str, list[Atom]] = {}
    for f in facts:
        fact_index.setdefault(f.pred, []).append(f)

    out: list[HornRule] = []
    seen: set[tuple] = set()
    for rule in rules:
        bindings = [dict()]
        for atom in rule.body:
            if atom.pred not in STATIC_FACT_PREDS or not atom.variables():
                continue
            next_bindings = []
            for binding in bindings:
                for f in fact_index.get(atom.pred, []):
                    extended = _unify(atom, f, binding)
                    if extended is not None:
                        next_bindings.append(extended)
            bindings = next_bindings
            if not bindings:
                break
        fallback = dict(rule.var_domains)
        for binding in bindings:
            free = sorted(rule.variables() - set(binding))
            pools = []
            for var in free:
                domain = fallback.get(var)
                if domain is None:
                    raise LogicError(
                        f"rule {rule.label!r}: variable {var} has neither a fact "
                        f"binding nor a fallback domain"
                    )
                pools.append(domains.get(domain, []))
            for combo in product(*pools):
                full = dict(binding)
                full.update(zip(free, combo))
                ground = rule.substitute(full)
                if not ground.is_ground():
                    raise LogicError(f"rule {rule.label!r} did not ground fully: {ground.render()}")
                key = (ground.head, ground.body)
                if key not in seen:
                    seen.add(key)
                    out.append(ground)
    return out


# ---------------------------------------------------------------------------
# Whole-system compilation


@dataclass
class CompiledSystem:
    """Everything the reasoner and the report writers need."""

    config: SystemConfig
    program: LogicProgram
    goals: tuple[Atom, ...]
    models: tuple[ExploitModel, ...]
    schemas: tuple[HornRule, ...]
    static_rules: tuple[HornRule, ...]
    exploit_rules: tuple[HornRule, ...]
    app_rules: tuple[HornRule, ...]
    fact_blocks: tuple[tuple[Atom, ...], ...] = field(default=())
    attacker: tuple[Atom, ...] = field(default=())
    vul_facts: tuple[Atom, ...] = field(default=())
    alphabet: tuple[str, ...] = field(default=())


def compile_system(
    config: SystemConfig,
    models: list[ExploitModel],
    bound_apps: list[BoundApp],
    extra_goals: tuple[Atom, ...] = (),
) -> CompiledSystem:
    from .logic import parse_atom

    blocks = config_fact_blocks(config)
    config_facts = [a for block in blocks for a in block]
    atk_facts = attacker_facts(config)

    vul_facts: list[Atom] = []
    seen_facts: set[Atom] = set()
    for model in models:
        for fact in model.facts():
            if fact not in seen_facts:
                seen_facts.add(fact)
                vul_facts.append(fact)

    alphabet: list[str] = []
    for bound in bound_apps:
        for cmd in bound.voice_commands:
            if cmd not in alphabet:
                alphabet.append(cmd)

    facts = config_facts + atk_facts + vul_facts
    domains = {
        "devices": [d.atom for d in config.devices],
        "networks": [n.atom for n in config.networks],
        "commands": alphabet,
    }

    static_library = (
        build_propagation_rules()
        + build_dependency_rules()
        + build_voice_rules()
        + build_capability_rules()
    )
    static_ground = ground_static_rules(static_library, facts, domains)

    exploit_rules = []
    seen_rules: set[tuple] = set()
    for model in models:
        head, body, label = exploit_rule_parts(model)
        key = (head, tuple(body))
        if key not in seen_rules:
            seen_rules.add(key)
            exploit_rules.append(HornRule(head, tuple(body), label=label))

    app_rules = [rule for bound in bound_apps for rule in bound.rules]

    goals: list[Atom] = []
    for text in config.goals:
        goals.append(parse_atom(text))
    for atom in extra_goals:
        if atom not in goals:
            goals.append(atom)

    program = LogicProgram(
        facts=tuple(facts),
        rules=tuple(exploit_rules) + tuple(static_ground) + tuple(app_rules),
    )
    return CompiledSystem(
        config=config,
        program=program,
        goals=tuple(goals),
        models=tuple(models),
        schemas=tuple(build_exploit_schemas()),
        static_rules=tuple(static_ground),
        exploit_rules=tuple(exploit_rules),
        app_rules=tuple(app_rules),
        fact_blocks=tuple(tuple(b) for b in blocks),
        attacker=tuple(atk_facts),
        vul_facts=tuple(vul_facts),
        alphabet=tuple(alphabet),
    )


def render_program(compiled: CompiledSystem) -> str:
    """Readable clause file: schemas, ground rules, facts, goals."""

    lines: list[str] = []

    def section(title: str) -> None:
        if lines:
            lines.append("")
        lines.append(f"% ==== {title} ====")

    section("exploit rule schemas (reference)")
    for rule in compiled.schemas:
        lines.append(f"% {rule.label}")
        lines.append(rule.render())
    section("attack rules instantiated from CVEs")
    for rule in compiled.exploit_rules:
        lines.append(f"% {rule.label}")
        lines.append(rule.render())
    section("propagation, dependency, and capability rules (ground)")
    for rule in compiled.static_rules:
        lines.append(f"% {rule.label}")
        lines.append(rule.render())
    section("app rules")
    for rule in compiled.app_rules:
        lines.append(f"% app: {rule.label}")
        lines.append(rule.render())
    section("facts: system configuration")
    lines.append(render_system_facts(compiled.config).rstrip("\n"))
    section("facts: attacker")
    for fact in compiled.attacker:
        lines.append(render_fact(fact))
    section("facts: vulnerabilities")
    for fact in compiled.vul_facts:
        lines.append(render_fact(fact))
    section("attack goals")
    for goal in compiled.goals:
        lines.append(render_fact(Atom("attackGoal", (goal.render(),))))
    return "\n".join(lines) + "\n"
