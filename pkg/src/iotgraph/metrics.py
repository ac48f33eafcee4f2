"""Quantitative questions over an attack graph.

Four queries, all driven by the AND/OR structure:

* ``shortest_trace``: the minimum-height proof tree for a goal, found by
  value iteration (facts cost 0, an AND step costs one more than its
  deepest input, an OR picks its cheapest option) and read back as an
  executable step list.
* ``attack_evidence``: for every node, the set of CVE combinations that
  suffice to reach it. Combinations are bitmasks over the graph's CVE
  universe; AND merges by pairwise union, OR by set union.
* ``blast_radius``: everything an attacker can reach using one single CVE.
* ``patch_set``: a small set of CVEs whose removal disconnects a goal,
  chosen greedily over the goal's evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .logic import Atom
from .reasoner import DERIVATION, FACT, RULE, AttackGraph

CatSet = frozenset[int]

EVIDENCE_CAP = 4096


def merge_ae_or(a: CatSet, b: CatSet) -> CatSet:
    """Alternative routes: either side's combinations work."""

    return a | b


def merge_ae_and(a: CatSet, b: CatSet) -> CatSet:
    """Joint requirements: one combination from each side, unioned."""

    return frozenset(x | y for x in a for y in b)


def _truncate(tags: CatSet) -> CatSet:
    if len(tags) <= EVIDENCE_CAP:
        return tags
    kept = sorted(tags, key=lambda t: (t.bit_count(), t))[:EVIDENCE_CAP]
    return frozenset(kept)


# ---------------------------------------------------------------------------
# Depth and traces


def node_depths(graph: AttackGraph) -> dict[int, float]:
    """Minimum proof-tree height per node; ``inf`` if underivable."""

    vals: dict[int, float] = {}
    for n in graph.nodes:
        vals[n.node_id] = 0.0 if n.kind == FACT else math.inf
    changed = True
    while changed:
        changed = False
        for n in graph.nodes:
            if n.kind == FACT:
                continue
            ps = graph.parents.get(n.node_id, ())
            if not ps:
                continue
            if n.kind == RULE:
                best = max(vals[p] for p in ps)
            else:
                best = min(vals[p] for p in ps)
            cand = best + 1.0
            if cand < vals[n.node_id]:
                vals[n.node_id] = cand
                changed = True
    return vals


@dataclass(frozen=True)
class TraceStep:
    node_id: int
    kind: str
    text: str
    depth: int


@dataclass(frozen=True)
class Trace:
    goal: Atom
    depth: int
    steps: tuple[TraceStep, ...]

    def render(self) -> str:
        lines = [f"goal {self.goal.render()} (depth {self.depth})"]
        tag = {FACT: "have", RULE: "apply", DERIVATION: "reach"}
        for step in self.steps:
            lines.append(f"  {tag[step.kind]:<5} {step.text}")
        return "\n".join(lines)


def shortest_trace(
    graph: AttackGraph, goal: Atom, depths: dict[int, float] | None = None
) -> Trace | None:
    """One minimum-height proof of the goal, primitives first.

    OR nodes take their cheapest incoming rule (lowest node id on ties),
    AND nodes take every input. Steps come out ordered by (depth, id),
    which is a valid execution order because a step's inputs are always
    strictly shallower.
    """

    node_id = graph.goal_nodes.get(goal)
    if node_id is None:
        return None
    if depths is None:
        depths = node_depths(graph)
    if math.isinf(depths[node_id]):
        return None

    picked: set[int] = set()
    stack = [node_id]
    while stack:
        nid = stack.pop()
        if nid in picked:
            continue
        picked.add(nid)
        node = graph.node(nid)
        if node.kind == FACT:
            continue
        ps = graph.parents.get(nid, ())
        if node.kind == DERIVATION:
            chosen = min(ps, key=lambda p: (depths[p], p))
            stack.append(chosen)
        else:
            stack.extend(ps)

    order = sorted(picked, key=lambda nid: (depths[nid], nid))
    steps = tuple(
        TraceStep(nid, graph.node(nid).kind, graph.node(nid).text, int(depths[nid]))
        for nid in order
    )
    return Trace(goal=goal, depth=int(depths[node_id]), steps=steps)


# ---------------------------------------------------------------------------
# Evidence


@dataclass
class Evidence:
    universe: tuple[str, ...]
    tags: dict[int, CatSet]

    def bit(self, cve_id: str) -> int | None:
        try:
            return 1 << self.universe.index(cve_id)
        except ValueError:
            return None

    def cves_in(self, tag: int) -> tuple[str, ...]:
        return tuple(cve for i, cve in enumerate(self.universe) if tag & (1 << i))

    def render_tags(self, node_id: int) -> str:
        tags = sorted(self.tags.get(node_id, frozenset()))
        parts = []
        for t in tags:
            names = self.cves_in(t)
            parts.append("{" + ", ".join(names) + "}" if names else "{}")
        return "[" + ", ".join(parts) + "]"


def attack_evidence(graph: AttackGraph) -> Evidence:
    """Fixpoint of the evidence lattice over the graph.

    Facts carry ``{their CVE bit}`` if they assert a vulnerability and
    ``{0}`` otherwise; rule nodes fold their inputs with the AND merge,
    derivations with the OR merge. Oversized tag sets are truncated to the
    smallest combinations to keep cyclic graphs bounded.
    """

    universe: list[str] = []
    for n in graph.fact_nodes():
        if n.atom is not None and n.atom.pred == "vulExists":
            cve = n.atom.args[1]
            if cve not in universe:
                universe.append(cve)
    bit = {cve: 1 << i for i, cve in enumerate(universe)}

    tags: dict[int, CatSet] = {}
    for n in graph.nodes:
        if n.kind == FACT:
            if n.atom is not None and n.atom.pred == "vulExists":
                tags[n.node_id] = frozenset({bit[n.atom.args[1]]})
            else:
                tags[n.node_id] = frozenset({0})
        else:
            tags[n.node_id] = frozenset()

    changed = True
    while changed:
        changed = False
        for n in graph.nodes:
            if n.kind == FACT:
                continue
            ps = graph.parents.get(n.node_id, ())
            if not ps:
                continue
            if n.kind == RULE:
                acc: CatSet = frozenset({0})
                for p in ps:
                    acc = merge_ae_and(acc, tags[p])
            else:
                acc = frozenset()
                for p in ps:
                    acc = merge_ae_or(acc, tags[p])
            acc = _truncate(acc)
            if acc != tags[n.node_id]:
                tags[n.node_id] = acc
                changed = True
    return Evidence(universe=tuple(universe), tags=tags)


def blast_radius(graph: AttackGraph, evidence: Evidence, cve_id: str) -> tuple[Atom, ...]:
    """Derived conditions reachable with this CVE and nothing else."""

    b = evidence.bit(cve_id)
    if b is None:
        return ()
    out = []
    for n in graph.derivation_nodes():
        if b in evidence.tags.get(n.node_id, frozenset()):
            out.append(n.atom)
    return tuple(out)


# ---------------------------------------------------------------------------
# Patch planning


@dataclass(frozen=True)
class PatchPlan:
    goal: Atom
    verdict: str  # "unreachable" | "unpatchable" | "blocked"
    cves: tuple[str, ...]

    def render(self) -> str:
        if self.verdict == "unreachable":
            return f"goal {self.goal.render()}: already unreachable"
        if self.verdict == "unpatchable":
            return f"goal {self.goal.render()}: reachable without any CVE, patching cannot block it"
        return f"goal {self.goal.render()}: blocked by patching " + ", ".join(self.cves)


def patch_set(graph: AttackGraph, evidence: Evidence, goal: Atom) -> PatchPlan:
    """Greedy minimum hitting set over the goal's evidence tags.

    Every tag is one way in; a patch breaks a tag when it removes at least
    one CVE the tag needs. Ties go to the lexicographically first CVE id.
    """

    node_id = graph.goal_nodes.get(goal)
    if node_id is None:
        return PatchPlan(goal=goal, verdict="unreachable", cves=())
    remaining = set(evidence.tags.get(node_id, frozenset()))
    if not remaining:
        return PatchPlan(goal=goal, verdict="unreachable", cves=())
    if 0 in remaining:
        return PatchPlan(goal=goal, verdict="unpatchable", cves=())

    picked: list[str] = []
    while remaining:
        best_cve, best_cover = None, -1
        for cve in sorted(evidence.universe):
            b = evidence.bit(cve)
            cover = sum(1 for t in remaining if t & b)
            if cover > best_cover:
                best_cve, best_cover = cve, cover
        if best_cve is None or best_cover <= 0:
            return PatchPlan(goal=goal, verdict="unpatchable", cves=())
        picked.append(best_cve)
        b = evidence.bit(best_cve)
        remaining = {t for t in remaining if not t & b}
    return PatchPlan(goal=goal, verdict="blocked", cves=tuple(picked))


# ---------------------------------------------------------------------------
# Report


def render_report(graph: AttackGraph) -> str:
    """Human-readable metrics over every configured goal."""

    depths = node_depths(graph)
    evidence = attack_evidence(graph)
    lines = [
        f"nodes: {len(graph.nodes)} "
        f"({len(graph.fact_nodes())} facts, {len(graph.rule_nodes())} rules, "
        f"{len(graph.derivation_nodes())} derived)",
        f"cve universe: {', '.join(evidence.universe) or '(none)'}",
    ]
    for goal in graph.goals:
        lines.append("")
        if not graph.reachable.get(goal, False):
            lines.append(f"goal {goal.render()}: unreachable")
            continue
        trace = shortest_trace(graph, goal, depths)
        if trace is None:
            lines.append(f"goal {goal.render()}: unreachable")
            continue
        lines.append(trace.render())
        node_id = graph.goal_nodes[goal]
        lines.append(f"  evidence: {evidence.render_tags(node_id)}")
        lines.append("  " + patch_set(graph, evidence, goal).render())
    for cve in evidence.universe:
        lines.append("")
        atoms = blast_radius(graph, evidence, cve)
        lines.append(f"blast radius of {cve} alone: {len(atoms)} conditions")
        for atom in atoms:
            lines.append(f"  {atom.render()}")
    return "\n".join(lines) + "\n"
