"""End-to-end analysis: configuration in, attack graph and metrics out.

The stages are deliberately separable (each is importable and testable on
its own): scan device names against the CVE store, classify hits into
exploit models, parse and bind app descriptions, compile the ground Horn
program, saturate, slice the attack graph, and evaluate metrics per goal.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics as metrics_mod
from .apps import AppBindError, AppParseError, BoundApp, bind_app, parse_app_description
from .cvestore import CveRecord, CveStore
from .exploits import ExploitModel, KeywordTables, models_for
from .logic import Atom
from .model import SystemConfig
from .reasoner import AttackGraph, build_attack_graph, default_goals, saturate
from .rules import CompiledSystem, compile_system, render_program

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeviceFinding:
    device: str  # atom
    device_name: str
    records: tuple[CveRecord, ...]


@dataclass(frozen=True)
class GoalResult:
    goal: Atom
    reachable: bool
    depth: int | None
    trace: metrics_mod.Trace | None
    patch: metrics_mod.PatchPlan


@dataclass
class AnalysisResult:
    config: SystemConfig
    findings: tuple[DeviceFinding, ...]
    models: tuple[ExploitModel, ...]
    bound_apps: tuple[BoundApp, ...]
    skipped_apps: tuple[tuple[str, str], ...]
    compiled: CompiledSystem
    graph: AttackGraph
    evidence: metrics_mod.Evidence
    goal_results: tuple[GoalResult, ...]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def any_reachable(self) -> bool:
        return any(r.reachable for r in self.goal_results)


def scan_devices(config: SystemConfig, store: CveStore) -> list[DeviceFinding]:
    """Look every device name up in the CVE store."""

    findings = []
    for d in config.devices:
        records = store.search(d.name)
        if records:
            findings.append(
                DeviceFinding(device=d.atom, device_name=d.name, records=tuple(records))
            )
    return findings


def build_models(
    config: SystemConfig,
    findings: list[DeviceFinding],
    tables: KeywordTables | None = None,
    overrides: dict[str, dict[str, str]] | None = None,
) -> list[ExploitModel]:
    networks = {n.atom: n for n in config.networks}
    out: list[ExploitModel] = []
    for finding in findings:
        device = config.device(finding.device)
        for record in finding.records:
            override = None
            if overrides and record.cve_id in overrides:
                entry = overrides[record.cve_id]
                override = (entry.get("precondition"), entry.get("effect"))
            out.extend(models_for(device, record, networks, tables, override=override))
    return out


def bind_apps(config: SystemConfig) -> tuple[list[BoundApp], list[tuple[str, str]]]:
    """Parse and bind every configured app; failures skip with a reason."""

    bound, skipped = [], []
    for app in config.apps:
        try:
            semantics = parse_app_description(app.description)
            bound.append(bind_app(app, semantics, config))
        except (AppParseError, AppBindError) as exc:
            log.warning("skipping app %r: %s", app.name, exc)
            skipped.append((app.name, str(exc)))
    return bound, skipped


def analyze(
    config: SystemConfig,
    store: CveStore,
    extra_goals: tuple[Atom, ...] = (),
    tables: KeywordTables | None = None,
    overrides: dict[str, dict[str, str]] | None = None,
) -> AnalysisResult:
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    findings = scan_devices(config, store)
    timings["scan"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    models = build_models(config, findings, tables, overrides)
    timings["classify"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bound, skipped = bind_apps(config)
    timings["apps"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    compiled = compile_system(config, models, bound, extra_goals=extra_goals)
    timings["compile"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    sat = saturate(compiled.program)
    goals = compiled.goals or default_goals(compiled.program, sat)
    graph = build_attack_graph(compiled.program, goals, sat)
    timings["reason"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    depths = metrics_mod.node_depths(graph)
    evidence = metrics_mod.attack_evidence(graph)
    goal_results = []
    for goal in goals:
        reachable = graph.reachable.get(goal, False)
        trace = metrics_mod.shortest_trace(graph, goal, depths) if reachable else None
        patch = metrics_mod.patch_set(graph, evidence, goal)
        goal_results.append(
            GoalResult(
                goal=goal,
                reachable=reachable,
                depth=trace.depth if trace else None,
                trace=trace,
                patch=patch,
            )
        )
    timings["metrics"] = time.perf_counter() - t0

    return AnalysisResult(
        config=config,
        findings=tuple(findings),
        models=tuple(models),
        bound_apps=tuple(bound),
        skipped_apps=tuple(skipped),
        compiled=compiled,
        graph=graph,
        evidence=evidence,
        goal_results=tuple(goal_results),
        timings=timings,
    )


def write_outputs(result: AnalysisResult, out_dir: str | Path, graph_format: str = "dot") -> list[Path]:
    """Write program, graph, metrics report, and run manifest files."""

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    program_path = out / "program.pl"
    program_path.write_text(render_program(result.compiled))
    written.append(program_path)

    json_path = out / "attack_graph.json"
    json_path.write_text(result.graph.to_json())
    written.append(json_path)

    if graph_format == "dot":
        graph_path = out / "attack_graph.dot"
        graph_path.write_text(result.graph.to_dot())
    else:
        graph_path = out / "attack_graph.txt"
        graph_path.write_text(result.graph.to_text())
    written.append(graph_path)

    report_path = out / "metrics_report.txt"
    report_path.write_text(metrics_mod.render_report(result.graph))
    written.append(report_path)

    manifest = {
        "devices": len(result.config.devices),
        "networks": len(result.config.networks),
        "devices_with_cves": len(result.findings),
        "cve_hits": sorted({r.cve_id for f in result.findings for r in f.records}),
        "exploit_models": len(result.models),
        "apps_bound": [b.app.name for b in result.bound_apps],
        "apps_skipped": [{"app": name, "reason": reason} for name, reason in result.skipped_apps],
        "facts": len(result.compiled.program.facts),
        "rules": len(result.compiled.program.rules),
        "graph_nodes": len(result.graph.nodes),
        "goals": [
            {
                "goal": r.goal.render(),
                "reachable": r.reachable,
                "depth": r.depth,
                "patch_verdict": r.patch.verdict,
                "patch_cves": list(r.patch.cves),
            }
            for r in result.goal_results
        ],
        "timings": {k: round(v, 6) for k, v in result.timings.items()},
    }
    manifest_path = out / "run_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    written.append(manifest_path)
    return written


def render_summary(result: AnalysisResult) -> str:
    """Terminal summary: one line per goal plus headline counts."""

    lines = [
        f"devices: {len(result.config.devices)}, "
        f"cves: {sum(len(f.records) for f in result.findings)} on {len(result.findings)} devices, "
        f"apps bound: {len(result.bound_apps)}"
        + (f" (skipped {len(result.skipped_apps)})" if result.skipped_apps else ""),
        f"program: {len(result.compiled.program.facts)} facts, "
        f"{len(result.compiled.program.rules)} rules; graph: {len(result.graph.nodes)} nodes",
    ]
    for r in result.goal_results:
        if r.reachable:
            lines.append(
                f"goal {r.goal.render()}: REACHABLE depth {r.depth}; {r.patch.render()}"
            )
        else:
            lines.append(f"goal {r.goal.render()}: unreachable")
    return "\n".join(lines)
